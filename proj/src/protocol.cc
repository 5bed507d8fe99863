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

#include "dmipt/protocol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmipt/clifford2q.h"
#include "dmipt/observables.h"

namespace dmipt {
namespace {

constexpr double kGridEps = 1e-9;

// Smallest multiple of 1/2 that is >= x, tolerant of round-off just above a multiple.
double ceil_to_half(double x) { return std::ceil(2.0 * x - 1e-9) / 2.0; }

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void CircuitConfig::validate(bool need_quarters) const {
    if (L < 2 || L % 2) throw std::invalid_argument("L must be an even integer >= 2");
    if (need_quarters && L % 4) throw std::invalid_argument("L must be divisible by 4 for I3");
}

DrivingSchedule DrivingSchedule::constant(double p, double p_c) {
    if (!in_unit_interval(p)) throw std::invalid_argument("constant schedule: p outside [0, 1]");
    DrivingSchedule s;
    s.p0_ = p;
    s.p_c_ = p_c;
    s.p_end_ = p;
    return s;
}

DrivingSchedule DrivingSchedule::ramp(Direction direction, double p0, double R, double p_c,
                                      std::optional<double> p_end) {
    if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("ramp: R must be positive");
    if (!in_unit_interval(p0) || !in_unit_interval(p_c)) throw std::invalid_argument("ramp: p0 / p_c outside [0, 1]");
    const double end = p_end.value_or(2.0 * p_c - p0);
    if (!in_unit_interval(end)) throw std::invalid_argument("ramp: p_end outside [0, 1]");
    if (direction == Direction::kFromArea) {
        if (!(p0 > p_c)) throw std::invalid_argument("ramp from the area-law side needs p0 > p_c");
        if (!(end <= p_c)) throw std::invalid_argument("ramp from the area-law side needs p_end <= p_c");
    } else {
        if (!(p0 < p_c)) throw std::invalid_argument("ramp from the volume-law side needs p0 < p_c");
        if (!(end >= p_c)) throw std::invalid_argument("ramp from the volume-law side needs p_end >= p_c");
    }
    DrivingSchedule s;
    s.ramp_ = true;
    s.direction_ = direction;
    s.p0_ = p0;
    s.R_ = R;
    s.p_c_ = p_c;
    s.p_end_ = end;
    s.t_c_ = ceil_to_half(std::abs(p0 - p_c) / R);
    s.t_end_ = s.t_c_ + ceil_to_half(std::abs(end - p_c) / R);
    return s;
}

double DrivingSchedule::nominal_p(double t) const {
    if (!ramp_) return p0_;
    const double sign = direction_ == Direction::kFromArea ? -1.0 : 1.0;
    return p_c_ + sign * R_ * (t - t_c_);
}

double DrivingSchedule::p_at(double t) const { return std::clamp(nominal_p(t), 0.0, 1.0); }

DrivingSchedule DrivingSchedule::starting_at(double new_p0) const {
    if (!ramp_) return constant(new_p0, p_c_);
    return ramp(direction_, new_p0, R_, p_c_, p_end_);
}

std::string observable_name(ObservableKind kind) {
    switch (kind) {
        case ObservableKind::kSRegion:
            return "S_region";
        case ObservableKind::kSHalf:
            return "S_half";
        case ObservableKind::kI3:
            return "I3";
        case ObservableKind::kSQ:
            return "S_Q";
    }
    return "?";
}

ObservableKind parse_observable(const std::string &name) {
    if (name == "S_region") return ObservableKind::kSRegion;
    if (name == "S_half") return ObservableKind::kSHalf;
    if (name == "I3") return ObservableKind::kI3;
    if (name == "S_Q") return ObservableKind::kSQ;
    throw std::invalid_argument("unknown observable '" + name + "'");
}

void evolve_half_step(Tableau &state, const CircuitConfig &config, size_t half_step, double p, Rng &rng,
                      std::vector<MeasurementRecord> *log) {
    if (!in_unit_interval(p)) throw std::invalid_argument("evolve: measurement probability outside [0, 1]");
    const size_t L = config.L;
    if (L > state.num_qubits()) throw std::invalid_argument("evolve: circuit larger than the state");
    const auto &group = CliffordGroup2Q::instance();

    auto unitary_layer = [&] {
        const size_t first = half_step % 2 == 0 ? 1 : 0;
        for (size_t x = first; x < L; x += 2) {
            state.apply(group.kernel(sample_uniform_2q_index(rng)), x, (x + 1) % L);
        }
    };
    auto measurement_layer = [&] {
        for (size_t q = 0; q < L; q++) {
            if (!bernoulli(rng, p)) continue;
            if (log) {
                MeasurementOutcome m = state.measure_z(q, rng);
                log->push_back({half_step, q, m.value, m.was_random});
            } else {
                state.collapse_z(q, rng);
            }
        }
    };
    if (config.layer_order == LayerOrder::kUnitaryFirst) {
        unitary_layer();
        measurement_layer();
    } else {
        measurement_layer();
        unitary_layer();
    }
}

void evolve_one_time_unit(Tableau &state, const CircuitConfig &config, const std::function<double(double)> &p_at,
                          double t, Rng &rng, std::vector<MeasurementRecord> *log) {
    const size_t base = static_cast<size_t>(std::llround(2.0 * t));
    evolve_half_step(state, config, base, p_at(t), rng, log);
    evolve_half_step(state, config, base + 1, p_at(t + 0.5), rng, log);
}

Tableau prepare_steady_state(const CircuitConfig &config, double p0, size_t t_eq, Rng &rng) {
    config.validate();
    if (t_eq < 1) throw std::invalid_argument("prepare_steady_state: T_eq must be >= 1");
    Tableau state = Tableau::zero_state(config.L);
    for (size_t k = 0; k < 2 * t_eq; k++) evolve_half_step(state, config, k, p0, rng);
    return state;
}

Tableau attach_ancilla(const Tableau &state, size_t site) {
    if (site >= state.num_qubits()) throw std::out_of_range("attach_ancilla: site out of range");
    const size_t ancilla = state.num_qubits();
    Tableau out = state.with_appended_qubit();
    out.h(ancilla);
    out.cnot(ancilla, site);
    if (ancilla_entropy(out, ancilla) == 1) return out;
    // The site was an X eigenstate, which a CNOT target leaves untouched; couple through CZ instead.
    out = state.with_appended_qubit();
    out.h(ancilla);
    out.h(site);
    out.cnot(ancilla, site);
    out.h(site);
    return out;
}

void TrajectoryPlan::validate() const {
    config.validate(observables.i3);
    if (observables.empty()) throw std::invalid_argument("no observables requested");
    for (size_t a : observables.regions) {
        if (a < 1 || a > config.L / 2) throw std::invalid_argument("region size must lie in [1, L/2]");
    }
    if (t_eq < 1) throw std::invalid_argument("T_eq must be >= 1");
    if (ancilla_site && *ancilla_site >= config.L) throw std::invalid_argument("ancilla site out of range");
    if (schedule.is_ramp()) {
        if (!(grid_spacing > 0)) throw std::invalid_argument("grid spacing must be positive");
    } else {
        if (variant.kind != InitialVariant::Kind::kSteady)
            throw std::invalid_argument("alternate initial variants require a ramp schedule");
        if (sample_every < 1) throw std::invalid_argument("sample_every must be >= 1");
    }
    if (variant.kind != InitialVariant::Kind::kSteady) {
        const double pa = variant.p_alt;
        if (!in_unit_interval(pa)) throw std::invalid_argument("alternate p0 outside [0, 1]");
        const bool area = schedule.direction() == Direction::kFromArea;
        if (area ? !(pa > schedule.p_c()) : !(pa < schedule.p_c()))
            throw std::invalid_argument("alternate p0 lies on the wrong side of p_c for this drive");
    }
}

DrivingSchedule TrajectoryPlan::effective_schedule() const {
    if (variant.kind == InitialVariant::Kind::kAlternateStart) return schedule.starting_at(variant.p_alt);
    return schedule;
}

double TrajectoryPlan::preparation_p() const {
    return variant.kind == InitialVariant::Kind::kSteady ? schedule.p0() : variant.p_alt;
}

namespace {

// Half-step boundaries (index k, time k/2) at which a sample is taken.
std::vector<size_t> sample_boundaries(const TrajectoryPlan &plan) {
    std::vector<size_t> out;
    const DrivingSchedule s = plan.effective_schedule();
    if (!s.is_ramp()) {
        for (size_t t = 0; t <= plan.t_measure; t += plan.sample_every) out.push_back(2 * t);
        return out;
    }
    const double lo = std::min(s.p0(), s.p_end());
    const double hi = std::max(s.p0(), s.p_end());
    const double step = plan.grid_spacing;
    const long j_lo = static_cast<long>(std::ceil((lo - s.p_c()) / step - kGridEps));
    const long j_hi = static_cast<long>(std::floor((hi - s.p_c()) / step + kGridEps));
    const bool decreasing = s.direction() == Direction::kFromArea;
    auto crossed = [&](double t) {
        const double p = s.nominal_p(t);
        long count = 0;
        for (long j = j_lo; j <= j_hi; j++) {
            const double v = s.p_c() + static_cast<double>(j) * step;
            if (decreasing ? v >= p - kGridEps : v <= p + kGridEps) count++;
        }
        return count;
    };
    const size_t K = static_cast<size_t>(std::llround(2.0 * s.duration()));
    long previous = 0;
    for (size_t k = 0; k <= K; k++) {
        long c = crossed(0.5 * static_cast<double>(k));
        if (c > previous) out.push_back(k);
        previous = c;
    }
    return out;
}

std::vector<ObservableValue> evaluate(const Tableau &state, const TrajectoryPlan &plan, std::optional<size_t> ancilla) {
    const ObservableSet &obs = plan.observables;
    const size_t L = plan.config.L;
    std::vector<ObservableValue> out;
    size_t prefix_len = obs.s_half ? L / 2 : 0;
    for (size_t a : obs.regions) prefix_len = std::max(prefix_len, a);
    std::vector<size_t> prefix;
    if (prefix_len) prefix = prefix_entropies(state, prefix_len);
    for (size_t a : obs.regions) out.push_back({ObservableKind::kSRegion, a, double(prefix[a - 1])});
    if (obs.s_half) out.push_back({ObservableKind::kSHalf, L / 2, double(prefix[L / 2 - 1])});
    if (obs.i3) out.push_back({ObservableKind::kI3, L / 4, double(tripartite_mutual_information(state, L))});
    if (obs.s_q) out.push_back({ObservableKind::kSQ, 1, double(ancilla_entropy(state, *ancilla))});
    return out;
}

}  // namespace

std::vector<double> sample_times(const TrajectoryPlan &plan) {
    std::vector<double> out;
    for (size_t k : sample_boundaries(plan)) out.push_back(0.5 * static_cast<double>(k));
    return out;
}

std::vector<TrajectorySample> run_trajectory(const TrajectoryPlan &plan, Rng &rng, std::vector<MeasurementRecord> *log) {
    plan.validate();
    const CircuitConfig &config = plan.config;
    const DrivingSchedule schedule = plan.effective_schedule();

    // Drive half-steps draw from streams keyed by their offset from t_c, so ensembles sharing seeds
    // but starting from different p0 meet the same circuit at the same p.
    const uint64_t drive_key = rng();
    const long long tc_steps = std::llround(2.0 * schedule.t_c());

    Tableau state = Tableau::zero_state(config.L);
    const size_t prep_steps = 2 * plan.t_eq;
    for (size_t k = 0; k < prep_steps; k++) evolve_half_step(state, config, k, plan.preparation_p(), rng, log);

    std::optional<size_t> ancilla;
    if (plan.observables.s_q) {
        state = attach_ancilla(state, plan.ancilla_site.value_or(config.L / 2));
        ancilla = config.L;
    }

    const std::vector<size_t> boundaries = sample_boundaries(plan);
    const size_t K = boundaries.empty() ? 0 : boundaries.back();
    std::vector<TrajectorySample> samples;
    samples.reserve(boundaries.size());
    size_t next = 0;
    for (size_t k = 0; k <= K; k++) {
        const double t = 0.5 * static_cast<double>(k);
        if (next < boundaries.size() && boundaries[next] == k) {
            TrajectorySample s;
            s.t = t;
            s.p = schedule.p_at(t);
            s.g = s.p - schedule.p_c();
            s.values = evaluate(state, plan, ancilla);
            samples.push_back(std::move(s));
            next++;
        }
        if (k < K) {
            const uint64_t offset = static_cast<uint64_t>(static_cast<long long>(k) - tc_steps);
            Rng step_rng(mix64(drive_key ^ mix64(offset)));
            evolve_half_step(state, config, prep_steps + k, schedule.p_at(t), step_rng, log);
        }
    }
    return samples;
}

}  // namespace dmipt
