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

#ifndef DMIPT_ENSEMBLE_H
#define DMIPT_ENSEMBLE_H

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmipt/protocol.h"

namespace dmipt {

struct RunSpec {
    std::string label;
    TrajectoryPlan plan;
    size_t n_traj = 1;
    uint64_t master_seed = 0;
    /// Constant schedules only: average each trajectory over its time samples before aggregating,
    /// producing one row per observable.
    bool steady_average = false;
    /// Keep every trajectory's samples in the aggregate (not persisted to CSV).
    bool keep_trajectories = false;

    void validate() const;
};

struct AggregatePoint {
    double t = 0;
    double p = 0;
    double g = 0;
    ObservableKind observable = ObservableKind::kSHalf;
    size_t region_size = 0;
    double mean = 0;
    double sem = 0;
    size_t n = 0;
    bool operator==(const AggregatePoint &) const = default;
};

struct EnsembleAggregate {
    RunSpec spec;
    std::vector<AggregatePoint> points;
    std::string code_version;
    double wall_seconds = 0;
    /// Serialized JSON of the experiment configuration that produced this run; may be empty.
    std::string config_echo;
    std::vector<std::vector<TrajectorySample>> trajectories;  // only with keep_trajectories

    /// Rows of one observable in time order.
    std::vector<AggregatePoint> series(ObservableKind kind, size_t region_size) const;
};

/// A trajectory failed; `index` identifies it within the ensemble.
class TrajectoryError : public std::runtime_error {
  public:
    TrajectoryError(size_t index, const std::string &what);
    size_t index() const { return index_; }

  private:
    size_t index_;
};

/// Runs spec.n_traj trajectories, trajectory i seeded by trajectory_seed(master_seed, i), on up to
/// `workers` threads (0 = hardware concurrency). The reduction runs in trajectory order, so the
/// result does not depend on the worker count.
EnsembleAggregate run_ensemble(const RunSpec &spec, size_t workers = 0);

/// Doubling check on the preparation: the state right after preparation (t = 0, constant drive at
/// the preparation p) is measured once with spec.plan.t_eq and once with twice that. `max_z` is
/// the largest |difference| over all observables in units of the combined sem.
struct EquilibrationCheck {
    size_t t_eq = 0;
    double max_z = 0;
    bool saturated = false;  // max_z <= z_limit
};
EquilibrationCheck check_equilibration(const RunSpec &spec, size_t workers = 0, double z_limit = 2.0);

/// Mean and standard error (n - 1 normalization; 0 for a single value) in input order.
struct MeanSem {
    double mean;
    double sem;
};
MeanSem mean_and_sem(const std::vector<double> &values);

// CSV + JSON sidecar persistence. The sidecar sits next to the CSV as <stem>.meta.json.

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::filesystem::path sidecar_path(const std::filesystem::path &csv_path);
void write_aggregate(const EnsembleAggregate &agg, const std::filesystem::path &csv_path);
EnsembleAggregate read_aggregate(const std::filesystem::path &csv_path);

/// CSV body only, exactly as written to disk.
std::string aggregate_csv(const EnsembleAggregate &agg);

bool same_content(const EnsembleAggregate &a, const EnsembleAggregate &b);

}  // namespace dmipt

#endif
