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

#include "dmipt/fts.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmipt {

void ScalingConstants::validate() const {
    if (!(nu > 0)) throw std::invalid_argument("scaling constants: nu must be positive");
    if (!(z > 0)) throw std::invalid_argument("scaling constants: z must be positive");
    if (!(r() > 1)) throw std::invalid_argument("scaling constants: r = z + 1/nu must exceed 1");
    if (!(p_c >= 0 && p_c <= 1)) throw std::invalid_argument("scaling constants: p_c outside [0, 1]");
}

DerivedExponents derived_exponents(const ScalingConstants &c) {
    c.validate();
    const double r = c.r();
    return {r, -c.alpha / r, 1.0 / (c.nu * r), 1.0 / r};
}

void Curve::validate() const {
    for (const auto &pt : points) {
        if (!(pt.y_err >= 0)) throw std::invalid_argument("curve: negative or NaN y_err");
    }
    if (points.size() < 2) return;
    const bool up = points[1].x > points[0].x;
    for (size_t i = 1; i < points.size(); i++) {
        const bool ok = up ? points[i].x > points[i - 1].x : points[i].x < points[i - 1].x;
        if (!ok) throw std::invalid_argument("curve: x must be strictly monotone");
    }
}

std::string collapse_mode_name(CollapseMode mode) {
    switch (mode) {
        case CollapseMode::kBulk:
            return "BULK";
        case CollapseMode::kVelocity:
            return "VELOCITY";
        case CollapseMode::kSize:
            return "SIZE";
        case CollapseMode::kDimensionless:
            return "DIMENSIONLESS";
        case CollapseMode::kSteady:
            return "STEADY";
        case CollapseMode::kCriticalSlice:
            return "CRITICAL_SLICE";
    }
    return "?";
}

CollapseMode parse_collapse_mode(const std::string &name) {
    for (CollapseMode m : {CollapseMode::kBulk, CollapseMode::kVelocity, CollapseMode::kSize,
                           CollapseMode::kDimensionless, CollapseMode::kSteady, CollapseMode::kCriticalSlice}) {
        if (collapse_mode_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown collapse mode '" + name + "'");
}

double CollapseResult::improvement() const {
    if (quality == 0) return quality_unrescaled == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return quality_unrescaled / quality;
}

namespace {

double need(const std::optional<double> &v, const char *what, CollapseMode mode) {
    if (!v) throw std::invalid_argument("rescale " + collapse_mode_name(mode) + ": curve label lacks " + what);
    if (!(*v > 0)) throw std::invalid_argument(std::string("rescale: ") + what + " must be positive");
    return *v;
}

// x' = x * sx, y' = y + dy.
struct Affine {
    double sx;
    double dy;
};

Affine transform_for(const CurveLabel &label, const ScalingConstants &c, CollapseMode mode) {
    const double r = c.r();
    switch (mode) {
        case CollapseMode::kBulk:
        case CollapseMode::kSteady: {
            const double a = need(label.region_size, "|A|", mode);
            if (mode == CollapseMode::kBulk) need(label.R, "R", mode);
            return {std::pow(a, 1.0 / c.nu), -c.alpha * std::log(a)};
        }
        case CollapseMode::kVelocity: {
            const double R = need(label.R, "R", mode);
            return {std::pow(R, -1.0 / (c.nu * r)), -c.delta() * std::log(R)};
        }
        case CollapseMode::kSize:
        case CollapseMode::kDimensionless: {
            const double L = need(label.L, "L", mode);
            need(label.R, "R", mode);
            const double dy = mode == CollapseMode::kSize ? -c.alpha * std::log(L / 2.0) : 0.0;
            return {std::pow(L, 1.0 / c.nu), dy};
        }
        case CollapseMode::kCriticalSlice: {
            const double a = need(label.region_size, "|A|", mode);
            return {std::pow(a, r), -c.alpha * std::log(a)};
        }
    }
    throw std::logic_error("unhandled collapse mode");
}

void check_fixed_product(const std::vector<Curve> &curves, const ScalingConstants &c, CollapseMode mode) {
    const bool by_region = mode == CollapseMode::kBulk;
    const bool by_size = mode == CollapseMode::kSize || mode == CollapseMode::kDimensionless;
    if (!by_region && !by_size) return;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (const auto &curve : curves) {
        const double R = *curve.label.R;
        const double extent = by_region ? *curve.label.region_size : *curve.label.L;
        const double product = R * std::pow(extent, c.r());
        lo = std::min(lo, product);
        hi = std::max(hi, product);
    }
    if (hi > 1.01 * lo) {
        throw std::invalid_argument("rescale " + collapse_mode_name(mode) + ": fixed product " +
                                    (by_region ? "R|A|^r" : "R L^r") + " differs across curves by more than 1%");
    }
}

// Piecewise-linear interpolation of a curve sorted by increasing x.
double interpolate(const std::vector<CurvePoint> &sorted, double x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x,
                               [](const CurvePoint &p, double v) { return p.x < v; });
    if (it == sorted.end()) return sorted.back().y;
    if (it->x == x || it == sorted.begin()) return it->y;
    const CurvePoint &b = *it;
    const CurvePoint &a = *(it - 1);
    const double w = (x - a.x) / (b.x - a.x);
    return a.y + w * (b.y - a.y);
}

}  // namespace

CollapseResult rescale_fts(const std::vector<Curve> &curves, const ScalingConstants &constants, CollapseMode mode) {
    constants.validate();
    CollapseResult out;
    out.mode = mode;
    std::vector<Affine> maps;
    for (const auto &curve : curves) {
        curve.validate();
        maps.push_back(transform_for(curve.label, constants, mode));
    }
    check_fixed_product(curves, constants, mode);
    for (size_t i = 0; i < curves.size(); i++) {
        Curve rc = curves[i];
        for (auto &pt : rc.points) {
            pt.x *= maps[i].sx;
            pt.y += maps[i].dy;
        }
        out.curves.push_back(std::move(rc));
    }
    out.quality_unrescaled = collapse_quality(curves);
    out.quality = collapse_quality(out.curves);
    return out;
}

std::vector<Curve> inverse_rescale(const std::vector<Curve> &rescaled, const ScalingConstants &constants,
                                   CollapseMode mode) {
    std::vector<Curve> out;
    for (const auto &curve : rescaled) {
        const Affine m = transform_for(curve.label, constants, mode);
        Curve c = curve;
        for (auto &pt : c.points) {
            pt.x /= m.sx;
            pt.y -= m.dy;
        }
        out.push_back(std::move(c));
    }
    return out;
}

double collapse_quality(const std::vector<Curve> &curves) {
    if (curves.size() < 2) throw std::invalid_argument("collapse_quality: need at least two curves");
    std::vector<std::vector<CurvePoint>> sorted;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto &curve : curves) {
        if (curve.points.empty()) throw std::invalid_argument("collapse_quality: empty curve");
        auto pts = curve.points;
        std::sort(pts.begin(), pts.end(), [](const CurvePoint &a, const CurvePoint &b) { return a.x < b.x; });
        lo = std::max(lo, pts.front().x);
        hi = std::min(hi, pts.back().x);
        sorted.push_back(std::move(pts));
    }
    if (!(lo <= hi)) throw std::invalid_argument("collapse_quality: curves share no x-support");

    std::vector<double> ys;
    double sq = 0;
    for (const auto &pts : sorted) {
        for (const auto &pt : pts) {
            if (pt.x < lo || pt.x > hi) continue;
            // Deviation from the master, accumulated as differences so identical curves give exactly 0.
            double dev = 0;
            for (const auto &other : sorted) dev += pt.y - interpolate(other, pt.x);
            dev /= static_cast<double>(sorted.size());
            sq += dev * dev;
            ys.push_back(pt.y);
        }
    }
    const double n = static_cast<double>(ys.size());
    double mean = 0;
    for (double y : ys) mean += y;
    mean /= n;
    double var = 0;
    for (double y : ys) var += (y - mean) * (y - mean);
    var /= n;
    if (var == 0) return 0.0;
    return (sq / n) / var;
}

namespace {

CurveLabel label_of(const RunSpec &spec, ObservableKind kind, size_t region_size) {
    CurveLabel label;
    const DrivingSchedule &s = spec.plan.schedule;
    if (s.is_ramp()) {
        label.R = s.R();
        label.direction = s.direction();
    }
    label.p0 = spec.plan.effective_schedule().p0();
    label.L = static_cast<double>(spec.plan.config.L);
    if (kind == ObservableKind::kSRegion || kind == ObservableKind::kSHalf)
        label.region_size = static_cast<double>(region_size);
    return label;
}

std::string series_name(ObservableKind kind, size_t region_size) {
    return observable_name(kind) + "(" + std::to_string(region_size) + ")";
}

}  // namespace

Curve curve_from_aggregate(const EnsembleAggregate &agg, ObservableKind kind, size_t region_size) {
    Curve c;
    c.label = label_of(agg.spec, kind, region_size);
    for (const auto &pt : agg.series(kind, region_size)) c.points.push_back({pt.g, pt.mean, pt.sem});
    if (c.points.empty())
        throw std::invalid_argument("aggregate '" + agg.spec.label + "' has no rows for " + series_name(kind, region_size));
    c.validate();
    return c;
}

Curve steady_curve(const std::vector<EnsembleAggregate> &aggs, ObservableKind kind, size_t region_size) {
    if (aggs.empty()) throw std::invalid_argument("steady_curve: no aggregates");
    Curve c;
    c.label = label_of(aggs.front().spec, kind, region_size);
    c.label.p0.reset();
    for (const auto &agg : aggs) {
        if (agg.spec.plan.schedule.is_ramp())
            throw std::invalid_argument("steady_curve: '" + agg.spec.label + "' is a ramp");
        auto rows = agg.series(kind, region_size);
        if (rows.size() != 1)
            throw std::invalid_argument("steady_curve: '" + agg.spec.label + "' needs exactly one time-averaged row for " +
                                        series_name(kind, region_size));
        c.points.push_back({rows[0].g, rows[0].mean, rows[0].sem});
    }
    std::sort(c.points.begin(), c.points.end(), [](const CurvePoint &a, const CurvePoint &b) { return a.x < b.x; });
    c.validate();
    return c;
}

Curve critical_slice(const std::vector<EnsembleAggregate> &aggs, ObservableKind kind, size_t region_size) {
    if (aggs.empty()) throw std::invalid_argument("critical_slice: no aggregates");
    Curve c;
    c.label = label_of(aggs.front().spec, kind, region_size);
    c.label.R.reset();
    for (const auto &agg : aggs) {
        if (!agg.spec.plan.schedule.is_ramp())
            throw std::invalid_argument("critical_slice: '" + agg.spec.label + "' is not a ramp");
        bool found = false;
        for (const auto &pt : agg.series(kind, region_size)) {
            if (std::abs(pt.g) < 1e-9) {
                c.points.push_back({agg.spec.plan.schedule.R(), pt.mean, pt.sem});
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("critical_slice: '" + agg.spec.label + "' has no sample at p_c");
    }
    std::sort(c.points.begin(), c.points.end(), [](const CurvePoint &a, const CurvePoint &b) { return a.x < b.x; });
    c.validate();
    return c;
}

}  // namespace dmipt
