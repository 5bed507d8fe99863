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

#ifndef DMIPT_EXPERIMENT_H
#define DMIPT_EXPERIMENT_H

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmipt/ensemble.h"
#include "dmipt/fts.h"
#include "dmipt/scaling.h"

namespace dmipt {

/// Invalid experiment configuration. The message names the offending key.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { kSteadySweep, kRampArea, kRampVolume, kAncillaRamp, kI3Ramp, kAnalyze };

std::string experiment_kind_name(ExperimentKind kind);

/// Settings of an `analyze` experiment.
struct AnalysisSpec {
    std::string label;
    std::vector<std::string> inputs;  // glob patterns of aggregate CSV files
    /// A collapse mode name (BULK, VELOCITY, ...) or one of fit_log, fit_power_log, fit_steady_alpha.
    std::string mode;
    std::optional<ObservableKind> observable;
    std::optional<size_t> region;
    std::optional<FitWindow> window;
    std::optional<AsymptoteForm> asymptote;
    ScalingConstants constants;
};

struct Experiment {
    ExperimentKind kind = ExperimentKind::kSteadySweep;
    /// Configuration after paper-scale and command-line overrides. Echoed into every sidecar
    /// without `out` and `workers`.
    nlohmann::json effective;
    std::filesystem::path out = "out";
    size_t workers = 0;
    std::vector<RunSpec> runs;  // run kinds
    AnalysisSpec analysis;      // kind analyze
};

/// Applies one "key=value" override. Dotted keys address nested objects; the value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json &config, const std::string &assignment);

/// Validates a configuration and expands it into run specs. Throws ConfigError.
Experiment build_experiment(nlohmann::json config, const std::vector<std::string> &overrides = {},
                            bool paper_scale = false);

/// Reads a JSON file and calls build_experiment. Throws ConfigError on unreadable or malformed files.
Experiment load_experiment(const std::filesystem::path &path, const std::vector<std::string> &overrides = {},
                           bool paper_scale = false);

/// <out>/<kind>/<label>.csv
std::filesystem::path run_output_path(const Experiment &e, const RunSpec &spec);

struct RunSummary {
    std::string label;
    std::filesystem::path csv;
    size_t rows = 0;
    double wall_seconds = 0;
};

/// Runs every ensemble of a run experiment and writes CSV + sidecar files, printing one line per
/// ensemble to `log` when given.
std::vector<RunSummary> execute_runs(const Experiment &e, std::ostream *log = nullptr);

struct AnalysisSummary {
    std::filesystem::path csv;
    std::filesystem::path report;
    nlohmann::json report_json;
};

/// Loads aggregates matching the input globs, rescales or fits them, and writes
/// <out>/analyze/<label>.csv plus <label>.report.json. Throws ConfigError when no input matches,
/// ParseError on malformed inputs and FitError when a fit fails.
AnalysisSummary execute_analysis(const Experiment &e, std::ostream *log = nullptr);

/// Paths matching any of the glob patterns, sorted and de-duplicated.
std::vector<std::filesystem::path> expand_globs(const std::vector<std::string> &patterns);

}  // namespace dmipt

#endif
