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

// Command-line front end: run ensembles, analyze their output, and audit reproducibility.

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmipt/experiment.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
    std::string config;
    std::string out;
    std::optional<uint64_t> seed;
    std::optional<size_t> workers;
    bool paper_scale = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App *cmd, CommonFlags &f, bool config_required) {
    auto *opt = cmd->add_option("--config", f.config, "experiment configuration (JSON)");
    if (config_required) opt->required();
    cmd->add_option("--out", f.out, "output directory (config key 'out')");
    cmd->add_option("--seed", f.seed, "master seed (config key 'seed')");
    cmd->add_option("--workers", f.workers, "worker threads, 0 = all cores (config key 'workers')");
    cmd->add_flag("--paper-scale", f.paper_scale, "apply the config's paper_scale block");
    cmd->add_option("--set", f.sets, "override a config key: key=value (repeatable)");
}

std::vector<std::string> overrides_of(const CommonFlags &f) {
    std::vector<std::string> o = f.sets;
    if (!f.out.empty()) o.push_back("out=" + json(f.out).dump());
    if (f.seed) o.push_back("seed=" + std::to_string(*f.seed));
    if (f.workers) o.push_back("workers=" + std::to_string(*f.workers));
    return o;
}

json read_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw dmipt::ConfigError("cannot read config file " + path);
    json j = json::parse(f, nullptr, false);
    if (j.is_discarded()) throw dmipt::ConfigError(path + ": not valid JSON");
    return j;
}

// Doubling check on every run's preparation before anything is written.
int check_preparations(const dmipt::Experiment &e) {
    int unsaturated = 0;
    for (const auto &spec : e.runs) {
        const dmipt::EquilibrationCheck c = dmipt::check_equilibration(spec, e.workers);
        std::cout << spec.label << ": T_eq " << c.t_eq << " vs " << 2 * c.t_eq << ", max |z| " << c.max_z
                  << (c.saturated ? " ok" : " NOT SATURATED") << '\n';
        if (!c.saturated) unsaturated++;
    }
    return unsaturated;
}

int cmd_run(const CommonFlags &f, bool check_eq) {
    dmipt::Experiment e = dmipt::build_experiment(read_config(f.config), overrides_of(f), f.paper_scale);
    if (check_eq && e.kind != dmipt::ExperimentKind::kAnalyze && check_preparations(e) > 0) {
        std::cerr << "preparation not saturated; raise T_eq\n";
        return kExitRuntime;
    }
    if (e.kind == dmipt::ExperimentKind::kAnalyze) {
        dmipt::execute_analysis(e, &std::cout);
    } else {
        dmipt::execute_runs(e, &std::cout);
    }
    return 0;
}

int cmd_analyze(const CommonFlags &f, const std::vector<std::string> &inputs, const std::string &mode) {
    json config = f.config.empty() ? json{{"kind", "analyze"}} : read_config(f.config);
    std::vector<std::string> o = overrides_of(f);
    if (!inputs.empty()) o.push_back("inputs=" + json(inputs).dump());
    if (!mode.empty()) o.push_back("mode=" + json(mode).dump());
    dmipt::Experiment e = dmipt::build_experiment(std::move(config), o, f.paper_scale);
    if (e.kind != dmipt::ExperimentKind::kAnalyze) throw dmipt::ConfigError("config key 'kind': analyze expects kind 'analyze'");
    dmipt::execute_analysis(e, &std::cout);
    return 0;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Sidecars carry a wall-clock time; everything else must match byte for byte.
std::string comparable(const fs::path &p) {
    std::string text = slurp(p);
    if (p.string().ends_with(".meta.json")) {
        json j = json::parse(text, nullptr, false);
        if (!j.is_discarded() && j.is_object()) {
            j.erase("wall_clock_seconds");
            return j.dump(2);
        }
    }
    return text;
}

std::vector<fs::path> tree(const fs::path &root) {
    std::vector<fs::path> out;
    if (!fs::exists(root)) return out;
    for (const auto &entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) out.push_back(fs::relative(entry.path(), root));
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Empty string when identical, otherwise a description of the first difference.
std::string diff_trees(const fs::path &a, const fs::path &b) {
    const auto ta = tree(a);
    const auto tb = tree(b);
    for (const auto &rel : ta) {
        if (!std::binary_search(tb.begin(), tb.end(), rel)) return rel.string() + ": missing from " + b.string();
    }
    for (const auto &rel : tb) {
        if (!std::binary_search(ta.begin(), ta.end(), rel)) return rel.string() + ": missing from " + a.string();
    }
    for (const auto &rel : ta) {
        const std::string x = comparable(a / rel);
        const std::string y = comparable(b / rel);
        if (x == y) continue;
        size_t off = 0;
        while (off < x.size() && off < y.size() && x[off] == y[off]) off++;
        std::string where = rel.string() + ": first difference at byte offset " + std::to_string(off);
        if (rel.string().ends_with(".meta.json")) where += " (of the sidecar with wall-clock time removed)";
        return where;
    }
    return "";
}

int cmd_seedcheck(const CommonFlags &f, const std::string &keep, const std::string &reference) {
    json config = read_config(f.config);
    std::vector<std::string> o = overrides_of(f);
    // Validate the configuration as given before shrinking it.
    dmipt::Experiment full = dmipt::build_experiment(config, o, f.paper_scale);
    if (full.kind == dmipt::ExperimentKind::kAnalyze) throw dmipt::ConfigError("config key 'kind': seedcheck needs a run experiment");
    o.push_back("n_traj=2");

    const fs::path scratch = fs::temp_directory_path() / ("dmipt-seedcheck-" + std::to_string(::getpid()));
    const fs::path first = keep.empty() ? scratch / "first" : fs::path(keep);
    const fs::path second = scratch / "second";
    fs::remove_all(scratch);

    auto run_into = [&](const fs::path &dir, size_t workers) {
        std::vector<std::string> oo = o;
        oo.push_back("out=" + json(dir.string()).dump());
        oo.push_back("workers=" + std::to_string(workers));
        dmipt::Experiment e = dmipt::build_experiment(config, oo, f.paper_scale);
        dmipt::execute_runs(e);
    };
    fs::remove_all(first);
    run_into(first, 1);
    fs::path other;
    if (reference.empty()) {
        run_into(second, f.workers.value_or(8) == 0 ? 8 : f.workers.value_or(8));
        other = second;
    } else {
        other = reference;
    }
    const size_t files = tree(first).size();
    std::string diff = diff_trees(first, other);
    if (files == 0) diff = "no output files were written";
    fs::remove_all(scratch);
    if (!diff.empty()) {
        std::cout << "seedcheck: MISMATCH " << diff << '\n';
        return kExitRuntime;
    }
    std::cout << "seedcheck: identical (" << files << " files, " << full.runs.size()
              << " ensembles, 2 trajectories each)\n";
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Driven critical dynamics of measurement-induced transitions in Clifford circuits"};
    app.set_version_flag("--version", std::string(DMIPT_VERSION));
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto *run = app.add_subcommand("run", "run the ensembles of an experiment config");
    add_common(run, run_flags, true);
    bool check_eq = false;
    run->add_flag("--check-equilibration", check_eq,
                  "first compare each run's prepared state at T_eq and 2 T_eq; abort if they differ by > 2 sem");

    CommonFlags analyze_flags;
    std::vector<std::string> inputs;
    std::string mode;
    auto *analyze = app.add_subcommand("analyze", "rescale, collapse or fit aggregate CSV files");
    add_common(analyze, analyze_flags, false);
    analyze->add_option("--input", inputs, "aggregate CSV glob (repeatable; config key 'inputs')");
    analyze->add_option("--mode", mode, "collapse mode or fit (config key 'mode')");

    CommonFlags seed_flags;
    std::string keep;
    std::string reference;
    auto *seedcheck = app.add_subcommand("seedcheck", "run a 2-trajectory miniature twice and compare outputs");
    add_common(seedcheck, seed_flags, true);
    seedcheck->add_option("--keep", keep, "keep the first output tree in this directory");
    seedcheck->add_option("--reference", reference, "compare against this existing tree instead of a second run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_flags, check_eq);
        if (*analyze) return cmd_analyze(analyze_flags, inputs, mode);
        if (*seedcheck) return cmd_seedcheck(seed_flags, keep, reference);
    } catch (const dmipt::ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dmipt::ParseError &e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dmipt::FitError &e) {
        std::cerr << "fit failed: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
