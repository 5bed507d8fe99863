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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string output;
};

fs::path work_dir(const std::string &name) {
    fs::path d = fs::temp_directory_path() / ("dmipt_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

Result run_cli(const std::string &args, const fs::path &dir) {
    const fs::path log = dir / "cli_output.txt";
    const std::string cmd = std::string(DMIPT_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream f(log);
    std::stringstream ss;
    ss << f.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const fs::path &dir, const std::string &name, const json &j) {
    fs::path p = dir / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

size_t count_files(const fs::path &dir, const std::string &ext) {
    size_t n = 0;
    if (!fs::exists(dir)) return 0;
    for (const auto &e : fs::directory_iterator(dir)) {
        if (e.path().string().ends_with(ext)) n++;
    }
    return n;
}

json ramp_config(const fs::path &out) {
    return {{"kind", "ramp_area"}, {"L", 16}, {"regions", {8}}, {"p0", 0.30995},
            {"R", {0.32, 0.16, 0.08, 0.04, 0.02, 0.01}}, {"n_traj", 4}, {"T_eq", 8}, {"out", out.string()}};
}

}  // namespace

TEST(cli, steady_sweep_writes_one_file_per_p) {
    fs::path dir = work_dir("steady");
    json c = {{"kind", "steady_sweep"}, {"L", 64}, {"p_range", {{"from", 0.10}, {"to", 0.22}, {"step", 0.01}}},
              {"n_traj", 100}, {"T_eq", 16}};
    auto cfg = write_config(dir, "sweep.json", c);
    Result r = run_cli("run --config " + cfg.string() + " --out " + (dir / "out").string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    ASSERT_EQ(count_files(dir / "out/steady_sweep", ".csv"), 13u);
    ASSERT_EQ(count_files(dir / "out/steady_sweep", ".meta.json"), 13u);
    // One summary line per ensemble.
    ASSERT_EQ(std::count(r.output.begin(), r.output.end(), '\n'), 13);
}

TEST(cli, ramp_then_analyze) {
    fs::path dir = work_dir("ramp");
    auto cfg = write_config(dir, "ramp.json", ramp_config(dir / "out"));
    Result r = run_cli("run --config " + cfg.string() + " --workers 2", dir);
    ASSERT_EQ(r.code, 0) << r.output;
    ASSERT_EQ(count_files(dir / "out/ramp_area", ".csv"), 6u);
    // Every R shares the p-grid rows around p_c.
    std::ifstream meta(dir / "out/ramp_area/L16_A8_R0.01.meta.json");
    json m = json::parse(meta);
    ASSERT_EQ(m["config"]["R"].size(), 6u);
    ASSERT_FALSE(m["config"].contains("workers"));
    ASSERT_EQ(m["run_spec"]["n_traj"], 4);

    const std::string glob = "'" + (dir / "out/ramp_area/*.csv").string() + "'";
    Result a = run_cli("analyze --input " + glob + " --mode VELOCITY --out " + (dir / "out").string(), dir);
    ASSERT_EQ(a.code, 0) << a.output;
    std::ifstream rep(dir / "out/analyze/VELOCITY.report.json");
    json report = json::parse(rep);
    ASSERT_EQ(report["mode"], "VELOCITY");
    ASSERT_TRUE(report.contains("quality"));
    ASSERT_TRUE(report.contains("quality_unrescaled"));
    ASSERT_TRUE(fs::exists(dir / "out/analyze/VELOCITY.csv"));

    Result f = run_cli("analyze --input " + glob + " --mode fit_log --set 'window=[0.01,0.32]' --out " +
                           (dir / "out").string(),
                       dir);
    ASSERT_EQ(f.code, 0) << f.output;
    std::ifstream frep(dir / "out/analyze/fit_log.report.json");
    json fit = json::parse(frep);
    ASSERT_EQ(fit["fit"]["window"][0], 0.01);
    ASSERT_EQ(fit["fit"]["parameters"][0]["name"], "slope");

    Result p = run_cli("analyze --input " + glob + " --mode fit_power_log --out " + (dir / "out").string(), dir);
    ASSERT_EQ(p.code, 1) << p.output;
}

TEST(cli, wrong_side_p0_exits_two) {
    fs::path dir = work_dir("p0");
    json c = ramp_config(dir / "out");
    c["p0"] = 0.05;
    auto cfg = write_config(dir, "bad.json", c);
    Result r = run_cli("run --config " + cfg.string(), dir);
    ASSERT_EQ(r.code, 2);
    ASSERT_NE(r.output.find("p0"), std::string::npos) << r.output;
    ASSERT_FALSE(fs::exists(dir / "out"));
}

TEST(cli, usage_errors_exit_two) {
    fs::path dir = work_dir("usage");
    ASSERT_EQ(run_cli("run", dir).code, 2);
    ASSERT_EQ(run_cli("frobnicate", dir).code, 2);
    ASSERT_EQ(run_cli("run --config " + (dir / "missing.json").string(), dir).code, 2);
    auto cfg = write_config(dir, "unknown.json", json{{"kind", "ramp_area"}, {"speed", 1}});
    Result r = run_cli("run --config " + cfg.string(), dir);
    ASSERT_EQ(r.code, 2);
    ASSERT_NE(r.output.find("speed"), std::string::npos);
}

TEST(cli, empty_glob_exits_two) {
    fs::path dir = work_dir("glob");
    Result r = run_cli("analyze --input '" + (dir / "nothing/*.csv").string() + "' --mode VELOCITY", dir);
    ASSERT_EQ(r.code, 2);
    ASSERT_NE(r.output.find("no inputs"), std::string::npos) << r.output;
}

TEST(cli, malformed_input_exits_two) {
    fs::path dir = work_dir("malformed");
    std::ofstream(dir / "x.csv") << "t,p,g,observable,region_size,mean,sem,n_traj\n1,2,3,S_half,4,zz,0,1\n";
    std::ofstream(dir / "x.meta.json") << "{}";
    Result r = run_cli("analyze --input " + (dir / "x.csv").string() + " --mode VELOCITY", dir);
    ASSERT_EQ(r.code, 2) << r.output;
}

TEST(cli, check_equilibration_aborts_on_short_preparation) {
    fs::path dir = work_dir("equilibration");
    json c = {{"kind", "ramp_volume"}, {"L", 16},       {"regions", {8}},         {"p0", 0.00995}, {"R", {0.32}},
              {"n_traj", 200},         {"T_eq", 1},     {"out", (dir / "out").string()}};
    auto cfg = write_config(dir, "short.json", c);
    Result r = run_cli("run --check-equilibration --config " + cfg.string(), dir);
    ASSERT_EQ(r.code, 1) << r.output;
    ASSERT_NE(r.output.find("NOT SATURATED"), std::string::npos);
    ASSERT_FALSE(fs::exists(dir / "out"));

    c["T_eq"] = 32;
    cfg = write_config(dir, "long.json", c);
    r = run_cli("run --check-equilibration --config " + cfg.string(), dir);
    ASSERT_EQ(r.code, 0) << r.output;
    ASSERT_EQ(count_files(dir / "out/ramp_volume", ".csv"), 1u);
}

TEST(cli, seedcheck) {
    fs::path dir = work_dir("seedcheck");
    json c = ramp_config(dir / "unused");
    c["R"] = {0.08, 0.04};
    auto cfg = write_config(dir, "seed.json", c);
    Result ok = run_cli("seedcheck --config " + cfg.string(), dir);
    ASSERT_EQ(ok.code, 0) << ok.output;
    ASSERT_NE(ok.output.find("identical"), std::string::npos);

    c["n_traj"] = 0;
    auto bad = write_config(dir, "zero.json", c);
    ASSERT_EQ(run_cli("seedcheck --config " + bad.string(), dir).code, 2);

    // Tamper with a kept tree and compare a fresh run against it.
    const fs::path kept = dir / "kept";
    ASSERT_EQ(run_cli("seedcheck --config " + cfg.string() + " --keep " + kept.string(), dir).code, 0);
    const fs::path victim = kept / "ramp_area/L16_A8_R0.04.csv";
    ASSERT_TRUE(fs::exists(victim));
    std::string text;
    {
        std::ifstream f(victim);
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
    }
    const size_t off = text.size() / 2;
    text[off] = text[off] == '7' ? '8' : '7';
    std::ofstream(victim) << text;
    const fs::path copy = dir / "tampered";
    fs::copy(kept, copy, fs::copy_options::recursive);
    Result mismatch =
        run_cli("seedcheck --config " + cfg.string() + " --keep " + (dir / "fresh").string() + " --reference " +
                    copy.string(),
                dir);
    ASSERT_EQ(mismatch.code, 1) << mismatch.output;
    ASSERT_NE(mismatch.output.find("byte offset " + std::to_string(off)), std::string::npos) << mismatch.output;
}
