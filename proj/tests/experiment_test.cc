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

#include "dmipt/experiment.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "gtest/gtest.h"

using namespace dmipt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json ramp_area_config() {
    return json{{"kind", "ramp_area"}, {"L", 32},  {"regions", {16}}, {"observables", {"S_region"}},
                {"p0", 0.30995},       {"R", {0.32, 0.16, 0.08, 0.04, 0.02, 0.01}}, {"n_traj", 10}};
}

std::string config_error(const json &config, const std::vector<std::string> &overrides = {}) {
    try {
        build_experiment(config, overrides);
    } catch (const ConfigError &e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(experiment, steady_sweep_grid) {
    json c = {{"kind", "steady_sweep"}, {"L", 64}, {"p_range", {{"from", 0.10}, {"to", 0.22}, {"step", 0.01}}},
              {"n_traj", 100}, {"observables", {"S_half"}}};
    Experiment e = build_experiment(c);
    ASSERT_EQ(e.kind, ExperimentKind::kSteadySweep);
    ASSERT_EQ(e.runs.size(), 13u);
    ASSERT_EQ(e.runs.front().label, "L64_p0.1");
    ASSERT_EQ(e.runs.back().label, "L64_p0.22");
    for (const auto &r : e.runs) {
        ASSERT_EQ(r.n_traj, 100u);
        ASSERT_TRUE(r.steady_average);
        ASSERT_EQ(r.plan.t_eq, 128u);
        ASSERT_FALSE(r.plan.schedule.is_ramp());
    }
    ASSERT_NEAR(e.runs[6].plan.schedule.p0(), 0.16, 1e-12);
    ASSERT_EQ(run_output_path(e, e.runs[0]), fs::path("out/steady_sweep/L64_p0.1.csv"));
}

TEST(experiment, ramp_area_one_run_per_velocity) {
    Experiment e = build_experiment(ramp_area_config());
    ASSERT_EQ(e.runs.size(), 6u);
    ASSERT_EQ(e.runs[0].label, "L32_A16_R0.32");
    ASSERT_EQ(e.runs[5].plan.schedule.R(), 0.01);
    std::set<uint64_t> seeds;
    for (const auto &r : e.runs) {
        ASSERT_EQ(r.plan.schedule.direction(), Direction::kFromArea);
        ASSERT_EQ(r.plan.observables.regions, std::vector<size_t>{16});
        seeds.insert(r.master_seed);
    }
    ASSERT_EQ(seeds.size(), 6u);
}

TEST(experiment, wrong_side_p0_names_key) {
    json c = ramp_area_config();
    c["p0"] = 0.1;
    const std::string msg = config_error(c);
    ASSERT_NE(msg.find("p0"), std::string::npos) << msg;
    ASSERT_NE(msg.find("p_c"), std::string::npos) << msg;
    json v = c;
    v["kind"] = "ramp_volume";
    v["p0"] = 0.3;
    ASSERT_NE(config_error(v).find("p0"), std::string::npos);
}

TEST(experiment, unknown_keys_rejected) {
    json c = ramp_area_config();
    c["velocity"] = 0.1;
    ASSERT_NE(config_error(c).find("'velocity'"), std::string::npos);
    json d = ramp_area_config();
    d["constants"] = {{"p_c", 0.16}, {"beta", 1}};
    ASSERT_NE(config_error(d).find("beta"), std::string::npos);
    json s = {{"kind", "steady_sweep"}, {"L", 8}, {"p", {0.1}}, {"R", 0.1}};
    ASSERT_NE(config_error(s).find("'R'"), std::string::npos);
    ASSERT_NE(config_error(json{{"kind", "sweep"}}).find("kind"), std::string::npos);
}

TEST(experiment, overrides) {
    json c = ramp_area_config();
    apply_override(c, "n_traj=7");
    apply_override(c, "constants.p_c=0.16");
    apply_override(c, "label=abc");
    apply_override(c, "R=[0.1,0.2]");
    ASSERT_EQ(c["n_traj"], 7);
    ASSERT_EQ(c["constants"]["p_c"], 0.16);
    ASSERT_EQ(c["label"], "abc");
    Experiment e = build_experiment(c, {"seed=99", "out=elsewhere"});
    ASSERT_EQ(e.runs.size(), 2u);
    ASSERT_EQ(e.runs[0].n_traj, 7u);
    ASSERT_EQ(e.runs[0].label, "abc_L32_A16_R0.1");
    ASSERT_EQ(e.runs[0].plan.schedule.p_c(), 0.16);
    ASSERT_EQ(e.out, fs::path("elsewhere"));
    ASSERT_EQ(e.effective["seed"], 99);
    ASSERT_THROW(apply_override(c, "novalue"), ConfigError);
}

TEST(experiment, paper_scale_block) {
    json c = ramp_area_config();
    c["paper_scale"] = {{"L", 1024}, {"regions", {512}}};
    Experiment small = build_experiment(c);
    ASSERT_EQ(small.runs[0].plan.config.L, 32u);
    ASSERT_FALSE(small.effective.contains("paper_scale"));
    Experiment big = build_experiment(c, {}, true);
    ASSERT_EQ(big.runs[0].plan.config.L, 1024u);
    ASSERT_EQ(big.runs[0].plan.observables.regions, std::vector<size_t>{512});
    // Command-line overrides win over the block.
    Experiment mixed = build_experiment(c, {"L=64", "regions=[8]"}, true);
    ASSERT_EQ(mixed.runs[0].plan.config.L, 64u);
}

TEST(experiment, fixed_product) {
    ScalingConstants k;
    json c = {{"kind", "ancilla_ramp"}, {"sizes", {16, 32, 64}}, {"fixed_product", 80.684}, {"n_traj", 5}};
    Experiment e = build_experiment(c);
    ASSERT_EQ(e.runs.size(), 3u);
    for (const auto &r : e.runs) {
        const double L = double(r.plan.config.L);
        ASSERT_NEAR(r.plan.schedule.R() * std::pow(L, k.r()), 80.684, 1e-9);
        ASSERT_TRUE(r.plan.observables.s_q);
        ASSERT_EQ(r.plan.schedule.direction(), Direction::kFromVolume);
    }
    json b = {{"kind", "ramp_area"}, {"L", 512}, {"regions", {64, 128, 256}}, {"fixed_product", 9.292}};
    Experiment eb = build_experiment(b);
    ASSERT_EQ(eb.runs.size(), 3u);
    ASSERT_NEAR(eb.runs[2].plan.schedule.R() * std::pow(256.0, k.r()), 9.292, 1e-9);
    ASSERT_EQ(eb.runs[2].plan.observables.regions, std::vector<size_t>{256});
    json both = b;
    both["R"] = 0.1;
    ASSERT_NE(config_error(both).find("R"), std::string::npos);
}

TEST(experiment, i3_both_directions) {
    json c = {{"kind", "i3_ramp"}, {"sizes", {32, 64}}, {"fixed_product", 50.134}, {"n_traj", 5}};
    Experiment e = build_experiment(c);
    ASSERT_EQ(e.runs.size(), 4u);
    ASSERT_EQ(e.runs[0].label.rfind("area_L32_R", 0), 0u) << e.runs[0].label;
    ASSERT_EQ(e.runs[2].label.rfind("volume_L32_R", 0), 0u) << e.runs[2].label;
    ASSERT_TRUE(e.runs[0].plan.observables.i3);
    json p = c;
    p["p0"] = 0.3;
    ASSERT_NE(config_error(p).find("p0"), std::string::npos);
    json bad = c;
    bad["sizes"] = {30};
    ASSERT_FALSE(config_error(bad).empty());
}

TEST(experiment, initial_variant) {
    json c = {{"kind", "ramp_volume"}, {"L", 16}, {"observables", {"S_half"}}, {"R", 0.005},
              {"initial_variant", {{"kind", "alternate_start"}, {"p_alt", 0.05995}}}};
    Experiment e = build_experiment(c);
    ASSERT_EQ(e.runs[0].plan.variant.kind, InitialVariant::Kind::kAlternateStart);
    ASSERT_EQ(e.runs[0].label, "L16_R0.005_alt0.05995");
    c["initial_variant"]["p_alt"] = 0.3;
    ASSERT_FALSE(config_error(c).empty());
}

TEST(experiment, invalid_counts) {
    json c = ramp_area_config();
    c["n_traj"] = 0;
    ASSERT_NE(config_error(c).find("n_traj"), std::string::npos);
    json r = ramp_area_config();
    r["regions"] = {17};
    ASSERT_FALSE(config_error(r).empty());
    json l = ramp_area_config();
    l["L"] = 31;
    ASSERT_NE(config_error(l).find("L"), std::string::npos);
}

TEST(experiment, analyze_spec) {
    json c = {{"kind", "analyze"}, {"inputs", {"a/*.csv"}}, {"mode", "VELOCITY"}, {"window", {0.01, 0.3}},
              {"asymptote", "log"}};
    Experiment e = build_experiment(c);
    ASSERT_EQ(e.kind, ExperimentKind::kAnalyze);
    ASSERT_EQ(e.analysis.mode, "VELOCITY");
    ASSERT_EQ(e.analysis.window->lo, 0.01);
    ASSERT_EQ(e.analysis.label, "VELOCITY");
    c["mode"] = "wobble";
    ASSERT_NE(config_error(c).find("mode"), std::string::npos);
}

TEST(experiment, run_and_analyze_end_to_end) {
    const fs::path out = fs::temp_directory_path() / "dmipt_experiment_test";
    fs::remove_all(out);
    json c = {{"kind", "ramp_area"}, {"L", 16}, {"regions", {8}}, {"R", {0.08, 0.04, 0.02}}, {"n_traj", 4},
              {"T_eq", 8}, {"out", out.string()}};
    Experiment e = build_experiment(c);
    auto runs = execute_runs(e);
    ASSERT_EQ(runs.size(), 3u);
    for (const auto &r : runs) {
        ASSERT_TRUE(fs::exists(r.csv));
        EnsembleAggregate agg = read_aggregate(r.csv);
        json expected = e.effective;
        expected.erase("out");
        ASSERT_EQ(json::parse(agg.config_echo), expected);
    }
    json a = {{"kind", "analyze"}, {"inputs", {(out / "ramp_area/*.csv").string()}}, {"mode", "VELOCITY"},
              {"out", out.string()}};
    AnalysisSummary s = execute_analysis(build_experiment(a));
    ASSERT_TRUE(fs::exists(s.csv));
    ASSERT_TRUE(fs::exists(s.report));
    ASSERT_EQ(s.report_json["curves"], 3);
    ASSERT_TRUE(s.report_json.contains("quality_unrescaled"));
    json f = a;
    f["mode"] = "fit_log";
    f["window"] = {0.01, 0.1};
    AnalysisSummary fs_ = execute_analysis(build_experiment(f));
    ASSERT_EQ(fs_.report_json["fit"]["n_points"], 3);
    json none = a;
    none["inputs"] = {(out / "nothing/*.csv").string()};
    ASSERT_THROW(execute_analysis(build_experiment(none)), ConfigError);
    fs::remove_all(out);
}
