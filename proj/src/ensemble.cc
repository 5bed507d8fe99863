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

#include "dmipt/ensemble.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <thread>

namespace dmipt {

TrajectoryError::TrajectoryError(size_t index, const std::string &what)
    : std::runtime_error("trajectory " + std::to_string(index) + ": " + what), index_(index) {}

void RunSpec::validate() const {
    if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
    if (steady_average && plan.schedule.is_ramp())
        throw std::invalid_argument("steady_average applies to constant schedules only");
    plan.validate();
}

std::vector<AggregatePoint> EnsembleAggregate::series(ObservableKind kind, size_t region_size) const {
    std::vector<AggregatePoint> out;
    for (const auto &pt : points) {
        if (pt.observable == kind && pt.region_size == region_size) out.push_back(pt);
    }
    return out;
}

MeanSem mean_and_sem(const std::vector<double> &values) {
    if (values.empty()) return {0.0, 0.0};
    double sum = 0;
    for (double v : values) sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

namespace {

std::vector<TrajectorySample> time_average(const std::vector<TrajectorySample> &samples) {
    if (samples.empty()) return {};
    TrajectorySample avg = samples.back();
    for (size_t j = 0; j < avg.values.size(); j++) {
        double sum = 0;
        for (const auto &s : samples) sum += s.values[j].value;
        avg.values[j].value = sum / static_cast<double>(samples.size());
    }
    return {avg};
}

}  // namespace

EnsembleAggregate run_ensemble(const RunSpec &spec, size_t workers) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    if (workers == 0) workers = std::max<size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, spec.n_traj);

    std::vector<std::vector<TrajectorySample>> results(spec.n_traj);
    std::vector<std::optional<std::string>> errors(spec.n_traj);
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= spec.n_traj) return;
            try {
                Rng rng(trajectory_seed(spec.master_seed, i));
                auto samples = run_trajectory(spec.plan, rng);
                results[i] = spec.steady_average ? time_average(samples) : std::move(samples);
            } catch (const std::exception &e) {
                errors[i] = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (size_t w = 0; w < workers; w++) pool.emplace_back(work);
    }
    for (size_t i = 0; i < spec.n_traj; i++) {
        if (errors[i]) throw TrajectoryError(i, *errors[i]);
    }

    EnsembleAggregate agg;
    agg.spec = spec;
    agg.code_version = DMIPT_VERSION;
    const auto &first = results.front();
    for (size_t k = 0; k < first.size(); k++) {
        for (size_t j = 0; j < first[k].values.size(); j++) {
            std::vector<double> column(spec.n_traj);
            for (size_t i = 0; i < spec.n_traj; i++) column[i] = results[i][k].values[j].value;
            MeanSem ms = mean_and_sem(column);
            AggregatePoint pt;
            pt.t = first[k].t;
            pt.p = first[k].p;
            pt.g = first[k].g;
            pt.observable = first[k].values[j].kind;
            pt.region_size = first[k].values[j].region_size;
            pt.mean = ms.mean;
            pt.sem = ms.sem;
            pt.n = spec.n_traj;
            agg.points.push_back(pt);
        }
    }
    if (spec.keep_trajectories) agg.trajectories = std::move(results);
    agg.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return agg;
}

EquilibrationCheck check_equilibration(const RunSpec &spec, size_t workers, double z_limit) {
    RunSpec probe = spec;
    probe.plan.schedule = DrivingSchedule::constant(spec.plan.preparation_p(), spec.plan.schedule.p_c());
    probe.plan.variant = InitialVariant{};
    probe.plan.t_measure = 0;
    probe.plan.sample_every = 1;
    probe.steady_average = false;
    probe.keep_trajectories = false;
    const EnsembleAggregate base = run_ensemble(probe, workers);
    probe.plan.t_eq *= 2;
    probe.master_seed ^= 0x9e3779b97f4a7c15ULL;
    const EnsembleAggregate doubled = run_ensemble(probe, workers);

    EquilibrationCheck out;
    out.t_eq = spec.plan.t_eq;
    for (size_t i = 0; i < base.points.size(); i++) {
        const AggregatePoint &a = base.points[i];
        const AggregatePoint &b = doubled.points[i];
        const double diff = std::abs(a.mean - b.mean);
        const double err = std::hypot(a.sem, b.sem);
        const double z = err > 0 ? diff / err : (diff > 1e-12 ? INFINITY : 0.0);
        out.max_z = std::max(out.max_z, z);
    }
    out.saturated = out.max_z <= z_limit;
    return out;
}

}  // namespace dmipt
