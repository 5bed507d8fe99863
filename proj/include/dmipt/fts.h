// Copyright 2026 The dmipt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMIPT_FTS_H
#define DMIPT_FTS_H

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmipt/ensemble.h"
#include "dmipt/protocol.h"
#include "dmipt/scaling.h"

namespace dmipt {

struct CurvePoint {
    double x = 0;
    double y = 0;
    double y_err = 0;
    bool operator==(const CurvePoint &) const = default;
};

/// Parameters held fixed along a curve. Which ones must be present depends on the rescaling.
struct CurveLabel {
    std::optional<double> R;
    std::optional<double> region_size;  // |A|
    std::optional<double> L;
    std::optional<double> p0;
    std::optional<Direction> direction;
    bool operator==(const CurveLabel &) const = default;
};

struct Curve {
    CurveLabel label;
    std::vector<CurvePoint> points;

    /// Throws std::invalid_argument unless x is strictly monotone and every y_err >= 0.
    void validate() const;
    bool operator==(const Curve &) const = default;
};

enum class CollapseMode {
    kBulk,           // (S - alpha ln|A|) vs g |A|^{1/nu}, fixed R |A|^r
    kVelocity,       // (S - delta ln R) vs g R^{-1/(nu r)}
    kSize,           // (S - alpha ln(L/2)) vs g L^{1/nu}, fixed R L^r
    kDimensionless,  // y unchanged vs g L^{1/nu}, fixed R L^r (I3, S_Q)
    kSteady,         // (S - alpha ln|A|) vs g |A|^{1/nu}
    kCriticalSlice,  // S(p_c) vs R  ->  (S - alpha ln|A|) vs R |A|^r
};

std::string collapse_mode_name(CollapseMode mode);
/// Accepts the upper-case names printed by collapse_mode_name.
CollapseMode parse_collapse_mode(const std::string &name);

struct CollapseResult {
    CollapseMode mode = CollapseMode::kBulk;
    std::vector<Curve> curves;  // rescaled, input order
    double quality = 0;
    double quality_unrescaled = 0;

    /// quality_unrescaled / quality; infinite for a perfect collapse of imperfect input.
    double improvement() const;
};

/// Rescales each curve for `mode` and scores the collapse before and after.
///
/// Throws std::invalid_argument when a curve lacks a label the mode needs, or when the fixed
/// product (R|A|^r or R L^r) of the fixed-product modes differs across curves by more than 1%.
CollapseResult rescale_fts(const std::vector<Curve> &curves, const ScalingConstants &constants, CollapseMode mode);

/// Undoes rescale_fts curve by curve.
std::vector<Curve> inverse_rescale(const std::vector<Curve> &rescaled, const ScalingConstants &constants,
                                   CollapseMode mode);

/// Spread of a set of curves about their pooled master curve.
///
/// The master curve on the shared x-support is the average of the curves' piecewise-linear
/// interpolants. The score is the mean squared deviation of all in-support points from the
/// master, divided by the variance of those points' y values: 0 for identical curves and about
/// 1 for curves that share nothing. Throws std::invalid_argument for fewer than two curves or
/// no common support.
double collapse_quality(const std::vector<Curve> &curves);

/// One observable of a ramp aggregate as a curve of mean versus g, labelled from its run spec.
Curve curve_from_aggregate(const EnsembleAggregate &agg, ObservableKind kind, size_t region_size);

/// Steady-state sweep: one point (g, mean) per aggregate, each holding a single time-averaged
/// row for the observable. Sorted by g.
Curve steady_curve(const std::vector<EnsembleAggregate> &aggs, ObservableKind kind, size_t region_size);

/// Ramp aggregates sharing |A|: one point (R, value at g = 0) per aggregate, sorted by R.
Curve critical_slice(const std::vector<EnsembleAggregate> &aggs, ObservableKind kind, size_t region_size);

// Fits.

class FitError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FitParameter {
    std::string name;
    double value = 0;
    double sigma = 0;
};

struct FitWindow {
    double lo = 0;
    double hi = 0;
};

struct FitResult {
    std::string model;
    std::vector<FitParameter> params;
    double rss = 0;          // weighted when sems were used
    double chi2_per_dof = 0; // rss / (n - k); 0 when n == k
    FitWindow window;
    size_t n_points = 0;
    bool weighted = false;
    bool large_residual = false;

    double value(const std::string &name) const;
    double sigma(const std::string &name) const;
};

/// y = slope * ln x + intercept by (weighted) least squares. The default window is the top
/// decade [x_max / 10, x_max]. Needs at least 3 points in the window and x > 0.
FitResult fit_log(const std::vector<CurvePoint> &points, std::optional<FitWindow> window = std::nullopt);

/// y = a x^kappa + b ln x + c with kappa in [0.01, 3]. (a, b, c) are solved linearly at each kappa
/// and kappa minimises the profiled residual. Needs at least 5 points. Throws FitError when kappa is
/// not identifiable or sits on the edge of its range.
FitResult fit_power_log(const std::vector<CurvePoint> &points, std::optional<FitWindow> window = std::nullopt);

/// S = alpha ln|A| + c over every point. Sets large_residual when the log law describes the data
/// poorly: chi^2 per degree of freedom above 4 with sems, otherwise an rms residual above 5% of
/// the y range.
FitResult fit_steady_alpha(const std::vector<CurvePoint> &points);

enum class AsymptoteForm {
    kLog,    // delta ln x + c
    kPower,  // c1 x^kappa, fitted on log-log axes
};

/// Fits the declared form to the pooled points of a collapse with x in the top decade.
FitResult asymptote_check(const CollapseResult &master, AsymptoteForm form);

}  // namespace dmipt

#endif
