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

#include <cmath>

#include <Eigen/Dense>

#include "gtest/gtest.h"

#include "dmipt/fts.h"

using namespace dmipt;

namespace {

std::vector<CurvePoint> sample(const std::vector<double> &xs, double (*f)(double), double err = 0) {
    std::vector<CurvePoint> out;
    for (double x : xs) out.push_back({x, f(x), err});
    return out;
}

const std::vector<double> kRGrid = {0.32, 0.16, 0.08, 0.04, 0.02, 0.01};

std::vector<double> log_grid(double lo, double hi, size_t n) {
    std::vector<double> out;
    for (size_t i = 0; i < n; i++) out.push_back(lo * std::pow(hi / lo, double(i) / double(n - 1)));
    return out;
}

}  // namespace

TEST(fit_log, exact_slope) {
    auto pts = sample(log_grid(0.03, 0.3, 7), [](double R) { return -0.875 * std::log(R) + 2.0; });
    FitResult f = fit_log(pts);
    ASSERT_NEAR(f.value("slope"), -0.875, 1e-12);
    ASSERT_NEAR(f.value("c"), 2.0, 1e-12);
    ASSERT_LT(f.rss, 1e-20);
    ASSERT_EQ(f.n_points, 7u);
    ASSERT_FALSE(f.weighted);
    ASSERT_NEAR(f.window.lo, 0.03, 1e-12);
    ASSERT_EQ(f.window.hi, 0.3);
}

TEST(fit_log, default_window_is_top_decade) {
    auto pts = sample(kRGrid, [](double R) { return R < 0.03 ? 100.0 : -0.8 * std::log(R); });
    FitResult f = fit_log(pts);
    ASSERT_EQ(f.n_points, 4u);
    ASSERT_NEAR(f.value("slope"), -0.8, 1e-12);
}

TEST(fit_log, weighted_fit_and_sigma) {
    // Two points with tiny errors pin the line; the outlier with a huge error barely moves it.
    std::vector<CurvePoint> pts = {{1, 0, 1e-3}, {2, std::log(2.0), 1e-3}, {3, 50, 1e3}};
    FitResult f = fit_log(pts, FitWindow{0.5, 3});
    ASSERT_TRUE(f.weighted);
    ASSERT_NEAR(f.value("slope"), 1.0, 1e-3);
    ASSERT_GT(f.sigma("slope"), 0.0);
    ASSERT_THROW(f.value("kappa"), std::out_of_range);
}

TEST(fit_log, too_few_points) {
    auto pts = sample({0.32, 0.16}, [](double R) { return std::log(R); });
    ASSERT_THROW(fit_log(pts), FitError);
    auto more = sample(kRGrid, [](double R) { return std::log(R); });
    ASSERT_THROW(fit_log(more, FitWindow{0.1, 0.4}), FitError);
    ASSERT_THROW(fit_log({{-1, 0, 0}, {1, 0, 0}, {2, 0, 0}}), FitError);
}

TEST(fit_power_log, recovers_pure_power) {
    auto pts = sample(kRGrid, [](double R) { return 3.0 * std::pow(R, 0.5575); });
    FitResult f = fit_power_log(pts, FitWindow{0.01, 0.32});
    ASSERT_NEAR(f.value("kappa"), 0.5575, 1e-6);
    ASSERT_NEAR(f.value("a"), 3.0, 3e-4);
    ASSERT_NEAR(f.value("b"), 0.0, 1e-4);
    ASSERT_NEAR(f.value("c"), 0.0, 1e-4);
    ASSERT_EQ(f.n_points, 6u);
}

TEST(fit_power_log, recovers_all_parameters) {
    auto pts = sample(log_grid(0.01, 0.32, 9),
                      [](double R) { return 4.0 * std::pow(R, 0.6) - 0.3 * std::log(R) + 1.5; });
    FitResult f = fit_power_log(pts, FitWindow{0.005, 0.5});
    ASSERT_NEAR(f.value("kappa") / 0.6, 1.0, 1e-4);
    ASSERT_NEAR(f.value("a") / 4.0, 1.0, 1e-4);
    ASSERT_NEAR(f.value("b") / -0.3, 1.0, 1e-4);
    ASSERT_NEAR(f.value("c") / 1.5, 1.0, 1e-4);
}

TEST(fit_power_log, constant_data_fails) {
    auto pts = sample(kRGrid, [](double) { return 2.0; });
    ASSERT_THROW(fit_power_log(pts, FitWindow{0.01, 0.32}), FitError);
}

TEST(fit_power_log, saturating_data_reaches_interior_minimum) {
    // Quench-limited shape: the power law flattens at large x.
    std::vector<CurvePoint> pts = {{0.01, 35.91, 0.344}, {0.02, 52.08, 0.407}, {0.04, 72.17, 0.393},
                                   {0.08, 91.13, 0.344}, {0.16, 100.05, 0.254}, {0.32, 102.63, 0.218}};
    FitResult f = fit_power_log(pts, FitWindow{0.01, 0.32});
    // Brute-force profile: (a, b, c) by normal equations on a fine kappa grid.
    double oracle = 1e300;
    for (double k = 0.02; k < 3; k += 0.001) {
        Eigen::MatrixXd A(6, 3);
        Eigen::VectorXd y(6);
        for (int i = 0; i < 6; i++) {
            const double w = 1 / pts[i].y_err;
            A.row(i) << w * std::pow(pts[i].x, k), w * std::log(pts[i].x), w;
            y[i] = w * pts[i].y;
        }
        const Eigen::VectorXd beta = (A.transpose() * A).ldlt().solve(A.transpose() * y);
        oracle = std::min(oracle, (A * beta - y).squaredNorm());
    }
    ASSERT_LE(f.rss, oracle * (1 + 1e-9));
    ASSERT_GT(f.value("kappa"), 0.7);
    ASSERT_LT(f.value("a"), 0);
}

TEST(fit_power_log, needs_five_points) {
    auto pts = sample(kRGrid, [](double R) { return std::pow(R, 0.5); });
    // The default top decade of this grid holds four values.
    ASSERT_THROW(fit_power_log(pts), FitError);
}

TEST(fit_steady_alpha, exact_log_law) {
    auto pts = sample({8, 16, 32, 64, 128}, [](double a) { return 1.57 * std::log(a) + 0.3; });
    FitResult f = fit_steady_alpha(pts);
    ASSERT_NEAR(f.value("alpha"), 1.57, 1e-12);
    ASSERT_NEAR(f.value("c"), 0.3, 1e-12);
    ASSERT_FALSE(f.large_residual);
}

TEST(fit_steady_alpha, linear_data_is_flagged) {
    auto pts = sample({8, 16, 32, 64, 128}, [](double a) { return 0.45 * a; });
    ASSERT_TRUE(fit_steady_alpha(pts).large_residual);
    // With error bars, chi^2 per degree of freedom decides.
    auto with_err = sample({8, 16, 32, 64, 128}, [](double a) { return 0.45 * a; }, 0.1);
    FitResult f = fit_steady_alpha(with_err);
    ASSERT_TRUE(f.weighted);
    ASSERT_TRUE(f.large_residual);
    ASSERT_GT(f.chi2_per_dof, 4.0);
}

TEST(fit_steady_alpha, needs_three_sizes) {
    ASSERT_THROW(fit_steady_alpha(sample({8, 16}, [](double a) { return std::log(a); })), FitError);
}

TEST(asymptote_check, log_form) {
    CollapseResult master;
    for (int shift = 0; shift < 2; shift++) {
        Curve c;
        for (double x : log_grid(0.5 + shift, 200, 25)) c.points.push_back({x, -0.875 * std::log(x) + 1.0, 0});
        master.curves.push_back(c);
    }
    FitResult f = asymptote_check(master, AsymptoteForm::kLog);
    ASSERT_NEAR(f.value("delta"), -0.875, 1e-10);
    ASSERT_NEAR(f.value("c"), 1.0, 1e-10);
    ASSERT_NEAR(f.window.lo, 20.0, 1e-12);
}

TEST(asymptote_check, power_form) {
    CollapseResult master;
    Curve c;
    for (double x : log_grid(0.1, 100, 30)) c.points.push_back({x, 2.0 * std::pow(x, 0.5575), 0});
    c.points.insert(c.points.begin(), CurvePoint{-1.0, 7.0, 0});
    master.curves.push_back(c);
    FitResult f = asymptote_check(master, AsymptoteForm::kPower);
    ASSERT_NEAR(f.value("kappa"), 0.5575, 1e-10);
    ASSERT_NEAR(f.value("c1"), 2.0, 1e-9);
}

TEST(asymptote_check, insufficient_tail) {
    CollapseResult master;
    Curve c;
    c.points = {{1, 1, 0}, {100, 2, 0}};
    master.curves.push_back(c);
    ASSERT_THROW(asymptote_check(master, AsymptoteForm::kLog), FitError);
    CollapseResult empty;
    ASSERT_THROW(asymptote_check(empty, AsymptoteForm::kLog), FitError);
}
