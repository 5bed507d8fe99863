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

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "dmipt/fts.h"

namespace dmipt {

double FitResult::value(const std::string &name) const {
    for (const auto &p : params) {
        if (p.name == name) return p.value;
    }
    throw std::out_of_range("fit result has no parameter '" + name + "'");
}

double FitResult::sigma(const std::string &name) const {
    for (const auto &p : params) {
        if (p.name == name) return p.sigma;
    }
    throw std::out_of_range("fit result has no parameter '" + name + "'");
}

namespace {

struct Prepared {
    Eigen::VectorXd x, y, w;  // w = 1/sem^2, or all ones
    bool weighted = false;
    FitWindow window;
};

Prepared prepare(const std::vector<CurvePoint> &points, std::optional<FitWindow> window, size_t min_points,
                 const char *who) {
    if (points.empty()) throw FitError(std::string(who) + ": no points");
    double xmax = -std::numeric_limits<double>::infinity();
    for (const auto &p : points) {
        if (!(p.x > 0)) throw FitError(std::string(who) + ": x must be positive");
        xmax = std::max(xmax, p.x);
    }
    FitWindow win = window.value_or(FitWindow{xmax / 10.0, xmax});
    std::vector<CurvePoint> in;
    for (const auto &p : points) {
        if (p.x >= win.lo * (1 - 1e-12) && p.x <= win.hi * (1 + 1e-12)) in.push_back(p);
    }
    std::sort(in.begin(), in.end(), [](const CurvePoint &a, const CurvePoint &b) { return a.x < b.x; });
    size_t distinct = in.empty() ? 0 : 1;
    for (size_t i = 1; i < in.size(); i++) distinct += in[i].x != in[i - 1].x;
    if (distinct < min_points) {
        throw FitError(std::string(who) + ": window [" + std::to_string(win.lo) + ", " + std::to_string(win.hi) +
                       "] holds " + std::to_string(distinct) + " distinct x values, need " + std::to_string(min_points));
    }
    Prepared out;
    out.window = win;
    const auto n = static_cast<Eigen::Index>(in.size());
    out.x.resize(n);
    out.y.resize(n);
    out.w.resize(n);
    out.weighted = std::all_of(in.begin(), in.end(), [](const CurvePoint &p) { return p.y_err > 0; });
    for (Eigen::Index i = 0; i < n; i++) {
        out.x[i] = in[i].x;
        out.y[i] = in[i].y;
        out.w[i] = out.weighted ? 1.0 / (in[i].y_err * in[i].y_err) : 1.0;
    }
    return out;
}

// Weighted linear least squares y ~ A beta. Covariance is absolute with weights, otherwise scaled
// by the residual variance.
FitResult linear_fit(const Prepared &d, const Eigen::MatrixXd &A, const std::vector<std::string> &names,
                     const std::string &model) {
    const Eigen::VectorXd sw = d.w.cwiseSqrt();
    const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
    const Eigen::VectorXd yw = sw.cwiseProduct(d.y);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Aw);
    if (qr.rank() < A.cols()) throw FitError(model + ": degenerate design matrix");
    const Eigen::VectorXd beta = qr.solve(yw);
    const Eigen::VectorXd resid = yw - Aw * beta;
    const double rss = resid.squaredNorm();
    const auto n = static_cast<size_t>(A.rows());
    const auto k = static_cast<size_t>(A.cols());
    Eigen::MatrixXd cov = (Aw.transpose() * Aw).inverse();
    const double dof = n > k ? static_cast<double>(n - k) : 0.0;
    if (!d.weighted) cov *= dof > 0 ? rss / dof : 0.0;

    FitResult out;
    out.model = model;
    for (size_t i = 0; i < k; i++) {
        const auto ii = static_cast<Eigen::Index>(i);
        out.params.push_back({names[i], beta[ii], std::sqrt(std::max(0.0, cov(ii, ii)))});
    }
    out.rss = rss;
    out.chi2_per_dof = dof > 0 ? rss / dof : 0.0;
    out.window = d.window;
    out.n_points = n;
    out.weighted = d.weighted;
    return out;
}

FitResult log_fit(const Prepared &d, const std::string &slope_name, const std::string &model) {
    Eigen::MatrixXd A(d.x.size(), 2);
    A.col(0) = d.x.array().log().matrix();
    A.col(1).setOnes();
    return linear_fit(d, A, {slope_name, "c"}, model);
}

// Model a x^k + b ln x + c with parameters theta = (a, k, b, c).
struct PowerLog {
    const Prepared &d;
    Eigen::VectorXd sw;
    Eigen::VectorXd lx;

    explicit PowerLog(const Prepared &data) : d(data), sw(data.w.cwiseSqrt()), lx(data.x.array().log().matrix()) {}

    Eigen::VectorXd residual(const Eigen::Vector4d &th) const {
        Eigen::VectorXd f = th[0] * (th[1] * lx.array()).exp() + th[2] * lx.array() + th[3];
        return sw.cwiseProduct(d.y - f);
    }
    Eigen::MatrixXd jacobian(const Eigen::Vector4d &th) const {
        const auto n = d.x.size();
        Eigen::MatrixXd J(n, 4);
        const Eigen::ArrayXd xk = (th[1] * lx.array()).exp();
        J.col(0) = xk.matrix();
        J.col(1) = (th[0] * xk * lx.array()).matrix();
        J.col(2) = lx;
        J.col(3).setOnes();
        return sw.asDiagonal() * J;
    }
};

constexpr double kKappaMin = 0.01;
constexpr double kKappaMax = 3.0;

// The model is linear in (a, b, c) at fixed kappa, so kappa is found by minimising the profiled rss.
struct Profile {
    Eigen::Vector4d theta;
    double rss;
};

Profile profile_at(const PowerLog &m, double kappa) {
    Eigen::MatrixXd A(m.d.x.size(), 3);
    A.col(0) = (kappa * m.lx.array()).exp().matrix();
    A.col(1) = m.lx;
    A.col(2).setOnes();
    const Eigen::MatrixXd Aw = m.sw.asDiagonal() * A;
    const Eigen::VectorXd yw = m.sw.cwiseProduct(m.d.y);
    const Eigen::Vector3d abc = Aw.colPivHouseholderQr().solve(yw);
    const Eigen::Vector4d th(abc[0], kappa, abc[1], abc[2]);
    return {th, m.residual(th).squaredNorm()};
}

}  // namespace

FitResult fit_log(const std::vector<CurvePoint> &points, std::optional<FitWindow> window) {
    return log_fit(prepare(points, window, 3, "fit_log"), "slope", "slope*ln(x)+c");
}

FitResult fit_steady_alpha(const std::vector<CurvePoint> &points) {
    double xmax = 0;
    for (const auto &p : points) xmax = std::max(xmax, p.x);
    FitResult out = log_fit(prepare(points, FitWindow{0.0, xmax}, 3, "fit_steady_alpha"), "alpha", "alpha*ln|A|+c");
    if (out.weighted) {
        out.large_residual = out.chi2_per_dof > 4.0;
    } else {
        double ylo = std::numeric_limits<double>::infinity();
        double yhi = -ylo;
        for (const auto &p : points) {
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
        const double rms = std::sqrt(out.rss / static_cast<double>(out.n_points));
        out.large_residual = rms > 0.05 * (yhi - ylo);
    }
    return out;
}

FitResult fit_power_log(const std::vector<CurvePoint> &points, std::optional<FitWindow> window) {
    const Prepared d = prepare(points, window, 5, "fit_power_log");
    const PowerLog model(d);

    // Coarse log-spaced scan, then Brent refinement around the best grid point.
    constexpr int kGrid = 240;
    std::vector<double> grid(kGrid);
    for (int i = 0; i < kGrid; i++) grid[i] = kKappaMin * std::pow(kKappaMax / kKappaMin, i / double(kGrid - 1));
    int best_i = 0;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGrid; i++) {
        const double rss = profile_at(model, grid[i]).rss;
        if (rss < best_rss) {
            best_rss = rss;
            best_i = i;
        }
    }
    const double lo = grid[std::max(best_i - 1, 0)];
    const double hi = grid[std::min(best_i + 1, kGrid - 1)];
    const auto refined = boost::math::tools::brent_find_minima(
        [&](double k) { return profile_at(model, k).rss; }, lo, hi, std::numeric_limits<double>::digits / 2);
    const Profile best = profile_at(model, refined.first);
    if (!std::isfinite(best.rss)) throw FitError("fit_power_log: non-finite residual");
    if (best.theta[1] < kKappaMin * 1.001 || best.theta[1] > kKappaMax * 0.999)
        throw FitError("fit_power_log: kappa pinned at the edge of [0.01, 3]");
    const Eigen::MatrixXd J = model.jacobian(best.theta);
    const Eigen::Matrix4d JtJ = J.transpose() * J;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4 || std::abs(best.theta[0]) < 1e-12) {
        throw FitError("fit_power_log: exponent not identifiable (amplitude " + std::to_string(best.theta[0]) +
                       ", Jacobian rank " + std::to_string(qr.rank()) + ")");
    }
    const auto n = static_cast<size_t>(d.x.size());
    const double dof = static_cast<double>(n - 4);
    Eigen::Matrix4d cov = JtJ.inverse();
    if (!d.weighted) cov *= dof > 0 ? best.rss / dof : 0.0;

    FitResult out;
    out.model = "a*x^kappa+b*ln(x)+c";
    const char *names[] = {"a", "kappa", "b", "c"};
    for (int i = 0; i < 4; i++) out.params.push_back({names[i], best.theta[i], std::sqrt(std::max(0.0, cov(i, i)))});
    out.rss = best.rss;
    out.chi2_per_dof = dof > 0 ? best.rss / dof : 0.0;
    out.window = d.window;
    out.n_points = n;
    out.weighted = d.weighted;
    return out;
}

FitResult asymptote_check(const CollapseResult &master, AsymptoteForm form) {
    std::vector<CurvePoint> pooled;
    double xmax = -std::numeric_limits<double>::infinity();
    for (const auto &c : master.curves) {
        for (const auto &p : c.points) {
            if (p.x > 0) {
                pooled.push_back(p);
                xmax = std::max(xmax, p.x);
            }
        }
    }
    if (pooled.empty()) throw FitError("asymptote_check: no points with x > 0");
    const FitWindow tail{xmax / 10.0, xmax};
    if (form == AsymptoteForm::kLog) {
        return log_fit(prepare(pooled, tail, 3, "asymptote_check"), "delta", "delta*ln(x)+c");
    }
    std::vector<CurvePoint> logged;
    for (const auto &p : pooled) {
        if (p.x < tail.lo * (1 - 1e-12)) continue;
        if (!(p.y > 0)) throw FitError("asymptote_check: power form needs y > 0 on the tail");
        logged.push_back({p.x, std::log(p.y), p.y_err > 0 ? p.y_err / p.y : 0.0});
    }
    FitResult fit = log_fit(prepare(logged, tail, 3, "asymptote_check"), "kappa", "c1*x^kappa");
    // Report the amplitude rather than its logarithm.
    FitParameter &c = fit.params[1];
    const double c1 = std::exp(c.value);
    fit.params[1] = {"c1", c1, c1 * c.sigma};
    return fit;
}

}  // namespace dmipt
