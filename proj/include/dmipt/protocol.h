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

#ifndef DMIPT_PROTOCOL_H
#define DMIPT_PROTOCOL_H

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dmipt/rng.h"
#include "dmipt/scaling.h"
#include "dmipt/tableau.h"

namespace dmipt {

enum class LayerOrder { kUnitaryFirst, kMeasurementFirst };

/// Brick-wall circuit on a ring of L system qubits.
struct CircuitConfig {
    size_t L = 0;
    LayerOrder layer_order = LayerOrder::kUnitaryFirst;

    /// L even and >= 2; additionally L % 4 == 0 when quarters are needed (I3).
    void validate(bool need_quarters = false) const;
};

enum class Direction {
    kFromArea,    // p decreasing through p_c
    kFromVolume,  // p increasing through p_c
};

/// Measurement probability versus circuit time: constant, or p = p_c -/+ R (t - t_c).
///
/// For a ramp, t_c is rounded up to the half-step grid so that the state at p_c is always
/// sampled exactly; the schedule then starts at most R/2 beyond p0 (clamped to [0, 1]).
class DrivingSchedule {
  public:
    static DrivingSchedule constant(double p, double p_c = ScalingConstants{}.p_c);
    /// p_end defaults to the mirror image of p0 about p_c.
    static DrivingSchedule ramp(Direction direction, double p0, double R, double p_c,
                                std::optional<double> p_end = std::nullopt);

    bool is_ramp() const { return ramp_; }
    Direction direction() const { return direction_; }
    double p0() const { return p0_; }
    double R() const { return R_; }
    double p_c() const { return p_c_; }
    double p_end() const { return p_end_; }
    double t_c() const { return t_c_; }
    /// Ramp length in time units (a multiple of 1/2), ending at the first half-step at or past p_end.
    double duration() const { return t_end_; }

    /// Measurement probability at time t, clamped to [0, 1].
    double p_at(double t) const;
    /// Unclamped p_c -/+ R (t - t_c); equals p_at inside [0, 1].
    double nominal_p(double t) const;

    /// Same drive started from a different p0.
    DrivingSchedule starting_at(double new_p0) const;

  private:
    bool ramp_ = false;
    Direction direction_ = Direction::kFromArea;
    double p0_ = 0;
    double R_ = 0;
    double p_c_ = 0;
    double p_end_ = 0;
    double t_c_ = 0;
    double t_end_ = 0;
};

enum class ObservableKind { kSRegion, kSHalf, kI3, kSQ };

std::string observable_name(ObservableKind kind);
ObservableKind parse_observable(const std::string &name);

/// Which observables to record. Regions are |A| values for intervals [0, |A|).
struct ObservableSet {
    std::vector<size_t> regions;
    bool s_half = false;
    bool i3 = false;
    bool s_q = false;

    bool empty() const { return regions.empty() && !s_half && !i3 && !s_q; }
};

struct ObservableValue {
    ObservableKind kind;
    size_t region_size;
    double value;
};

struct TrajectorySample {
    double t = 0;
    double p = 0;
    double g = 0;  // p - p_c
    std::vector<ObservableValue> values;
};

struct InitialVariant {
    enum class Kind {
        kSteady,              // steady state at p0, ramp from p0
        kAlternateStart,      // steady state at p_alt, ramp from p_alt
        kQuenchFromAlternate  // steady state at p_alt, ramp from p0
    };
    Kind kind = Kind::kSteady;
    double p_alt = 0;
};

struct MeasurementRecord {
    size_t half_step;
    size_t qubit;
    int value;
    bool was_random;
    bool operator==(const MeasurementRecord &) const = default;
};

/// Half-step `half_step` of the brick wall: gates on odd bonds (x odd, wrapping (L-1, 0)) for
/// even half-steps and on even bonds otherwise, plus a measurement layer at probability p on
/// each system qubit. Qubits >= L (an ancilla) are never touched.
void evolve_half_step(Tableau &state, const CircuitConfig &config, size_t half_step, double p, Rng &rng,
                      std::vector<MeasurementRecord> *log = nullptr);

/// Two half-steps starting at time t: measurement probabilities p_at(t) and p_at(t + 1/2).
void evolve_one_time_unit(Tableau &state, const CircuitConfig &config, const std::function<double(double)> &p_at,
                          double t, Rng &rng, std::vector<MeasurementRecord> *log = nullptr);

/// |0...0> evolved for t_eq time units at constant p0.
Tableau prepare_steady_state(const CircuitConfig &config, double p0, size_t t_eq, Rng &rng);

/// Appends an ancilla at index L and Bell-pairs it with `site` (H on ancilla, CNOT ancilla -> site;
/// CZ instead when the site is an X eigenstate), so the ancilla entropy is 1 afterwards.
Tableau attach_ancilla(const Tableau &state, size_t site);

/// Everything one trajectory needs besides its random stream.
struct TrajectoryPlan {
    CircuitConfig config;
    DrivingSchedule schedule = DrivingSchedule::constant(0);
    ObservableSet observables;
    size_t t_eq = 0;
    InitialVariant variant;
    double grid_spacing = 0.005;  // ramps: sample when p crosses p_c + k * spacing
    size_t t_measure = 0;         // constant schedules: sample every `sample_every` up to t_measure
    size_t sample_every = 1;
    std::optional<size_t> ancilla_site;  // defaults to L/2 when S_Q is requested

    /// Throws std::invalid_argument on inconsistent combinations.
    void validate() const;
    /// The schedule actually driven after applying the initial variant.
    DrivingSchedule effective_schedule() const;
    /// Probability used for steady-state preparation.
    double preparation_p() const;
};

/// Prepares the initial state and drives it, returning samples in time order. The first draw of
/// `rng` keys the drive: half-step k after preparation uses its own stream derived from that draw
/// and k - 2 t_c, so the drive circuit at a given p does not depend on p0 or the preparation.
std::vector<TrajectorySample> run_trajectory(const TrajectoryPlan &plan, Rng &rng,
                                             std::vector<MeasurementRecord> *log = nullptr);

/// Sample times of run_trajectory, which depend only on the plan.
std::vector<double> sample_times(const TrajectoryPlan &plan);

}  // namespace dmipt

#endif
