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

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dmipt/ensemble.h"
#include "dmipt/json_io.h"

namespace dmipt {

using nlohmann::json;

namespace {

const char *kCsvHeader = "t,p,g,observable,region_size,mean,sem,n_traj";

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string direction_name(Direction d) { return d == Direction::kFromArea ? "from_area" : "from_volume"; }

Direction parse_direction(const std::string &s) {
    if (s == "from_area") return Direction::kFromArea;
    if (s == "from_volume") return Direction::kFromVolume;
    throw std::invalid_argument("unknown drive direction '" + s + "'");
}

std::string variant_name(InitialVariant::Kind k) {
    switch (k) {
        case InitialVariant::Kind::kSteady:
            return "steady";
        case InitialVariant::Kind::kAlternateStart:
            return "alternate_start";
        case InitialVariant::Kind::kQuenchFromAlternate:
            return "quench_from_alternate";
    }
    return "?";
}

InitialVariant::Kind parse_variant(const std::string &s) {
    if (s == "steady") return InitialVariant::Kind::kSteady;
    if (s == "alternate_start") return InitialVariant::Kind::kAlternateStart;
    if (s == "quench_from_alternate") return InitialVariant::Kind::kQuenchFromAlternate;
    throw std::invalid_argument("unknown initial variant '" + s + "'");
}

}  // namespace

json to_json(const ScalingConstants &c) { return {{"p_c", c.p_c}, {"nu", c.nu}, {"z", c.z}, {"alpha", c.alpha}}; }

json to_json(const RunSpec &spec) {
    const TrajectoryPlan &plan = spec.plan;
    const DrivingSchedule &s = plan.schedule;
    json schedule;
    if (s.is_ramp()) {
        schedule = {{"kind", "ramp"},     {"direction", direction_name(s.direction())},
                    {"p0", s.p0()},       {"R", s.R()},
                    {"p_c", s.p_c()},     {"p_end", s.p_end()},
                    {"t_c", s.t_c()},     {"duration", s.duration()}};
    } else {
        schedule = {{"kind", "constant"}, {"p", s.p0()}, {"p_c", s.p_c()}};
    }
    json j = {
        {"label", spec.label},
        {"L", plan.config.L},
        {"layer_order", plan.config.layer_order == LayerOrder::kUnitaryFirst ? "unitary_first" : "measurement_first"},
        {"schedule", schedule},
        {"observables",
         {{"regions", plan.observables.regions},
          {"S_half", plan.observables.s_half},
          {"I3", plan.observables.i3},
          {"S_Q", plan.observables.s_q}}},
        {"T_eq", plan.t_eq},
        {"initial_variant", {{"kind", variant_name(plan.variant.kind)}, {"p_alt", plan.variant.p_alt}}},
        {"grid_spacing", plan.grid_spacing},
        {"T_measure", plan.t_measure},
        {"sample_every", plan.sample_every},
        {"n_traj", spec.n_traj},
        {"master_seed", spec.master_seed},
        {"steady_average", spec.steady_average},
    };
    j["ancilla_site"] = plan.ancilla_site ? json(*plan.ancilla_site) : json(nullptr);
    return j;
}

RunSpec run_spec_from_json(const json &j) {
    RunSpec spec;
    spec.label = j.at("label").get<std::string>();
    TrajectoryPlan &plan = spec.plan;
    plan.config.L = j.at("L").get<size_t>();
    plan.config.layer_order =
        j.at("layer_order").get<std::string>() == "unitary_first" ? LayerOrder::kUnitaryFirst : LayerOrder::kMeasurementFirst;
    const json &s = j.at("schedule");
    if (s.at("kind") == "ramp") {
        plan.schedule = DrivingSchedule::ramp(parse_direction(s.at("direction")), s.at("p0").get<double>(),
                                              s.at("R").get<double>(), s.at("p_c").get<double>(),
                                              s.at("p_end").get<double>());
    } else {
        plan.schedule = DrivingSchedule::constant(s.at("p").get<double>(), s.at("p_c").get<double>());
    }
    const json &o = j.at("observables");
    plan.observables.regions = o.at("regions").get<std::vector<size_t>>();
    plan.observables.s_half = o.at("S_half").get<bool>();
    plan.observables.i3 = o.at("I3").get<bool>();
    plan.observables.s_q = o.at("S_Q").get<bool>();
    plan.t_eq = j.at("T_eq").get<size_t>();
    plan.variant.kind = parse_variant(j.at("initial_variant").at("kind").get<std::string>());
    plan.variant.p_alt = j.at("initial_variant").at("p_alt").get<double>();
    plan.grid_spacing = j.at("grid_spacing").get<double>();
    plan.t_measure = j.at("T_measure").get<size_t>();
    plan.sample_every = j.at("sample_every").get<size_t>();
    if (!j.at("ancilla_site").is_null()) plan.ancilla_site = j.at("ancilla_site").get<size_t>();
    spec.n_traj = j.at("n_traj").get<size_t>();
    spec.master_seed = j.at("master_seed").get<uint64_t>();
    spec.steady_average = j.at("steady_average").get<bool>();
    return spec;
}

std::filesystem::path sidecar_path(const std::filesystem::path &csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension(".meta.json");
    return p;
}

std::string aggregate_csv(const EnsembleAggregate &agg) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto &pt : agg.points) {
        out += fmt17(pt.t) + ',' + fmt17(pt.p) + ',' + fmt17(pt.g) + ',' + observable_name(pt.observable) + ',' +
               std::to_string(pt.region_size) + ',' + fmt17(pt.mean) + ',' + fmt17(pt.sem) + ',' +
               std::to_string(pt.n) + '\n';
    }
    return out;
}

void write_aggregate(const EnsembleAggregate &agg, const std::filesystem::path &csv_path) {
    if (csv_path.has_parent_path()) std::filesystem::create_directories(csv_path.parent_path());
    {
        std::ofstream f(csv_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + csv_path.string());
        f << aggregate_csv(agg);
    }
    json meta = {{"run_spec", to_json(agg.spec)},
                 {"code_version", agg.code_version},
                 {"wall_clock_seconds", agg.wall_seconds}};
    if (!agg.config_echo.empty()) meta["config"] = json::parse(agg.config_echo);
    std::ofstream f(sidecar_path(csv_path), std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + sidecar_path(csv_path).string());
    f << meta.dump(2) << '\n';
}

namespace {

std::vector<std::string> split_commas(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

EnsembleAggregate read_aggregate(const std::filesystem::path &csv_path) {
    const std::string file = csv_path.string();
    std::ifstream f(csv_path, std::ios::binary);
    if (!f) throw ParseError(file + ": cannot open");
    const auto meta_path = sidecar_path(csv_path);
    if (!std::filesystem::exists(meta_path)) throw ParseError(file + ": metadata missing (" + meta_path.string() + ")");

    EnsembleAggregate agg;
    std::string line;
    size_t line_no = 0;
    static const char *names[] = {"t", "p", "g", "observable", "region_size", "mean", "sem", "n_traj"};
    while (std::getline(f, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1) {
            if (line != kCsvHeader) throw ParseError(file + ": line 1: unexpected header '" + line + "'");
            continue;
        }
        if (line.empty()) continue;
        auto cells = split_commas(line);
        if (cells.size() != 8) {
            throw ParseError(file + ": line " + std::to_string(line_no) + ": expected 8 columns, found " +
                             std::to_string(cells.size()));
        }
        auto cell_error = [&](size_t col, const std::string &why) {
            return ParseError(file + ": line " + std::to_string(line_no) + ", column " + std::to_string(col + 1) +
                              " (" + names[col] + "): " + why + " '" + cells[col] + "'");
        };
        auto number = [&](size_t col) {
            const std::string &c = cells[col];
            char *end = nullptr;
            errno = 0;
            double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size() || errno == ERANGE) throw cell_error(col, "not a number");
            return v;
        };
        auto count = [&](size_t col) {
            const std::string &c = cells[col];
            char *end = nullptr;
            unsigned long long v = std::strtoull(c.c_str(), &end, 10);
            if (c.empty() || c[0] == '-' || end != c.c_str() + c.size()) throw cell_error(col, "not a count");
            return static_cast<size_t>(v);
        };
        AggregatePoint pt;
        pt.t = number(0);
        pt.p = number(1);
        pt.g = number(2);
        try {
            pt.observable = parse_observable(cells[3]);
        } catch (const std::invalid_argument &) {
            throw cell_error(3, "unknown observable");
        }
        pt.region_size = count(4);
        pt.mean = number(5);
        pt.sem = number(6);
        if (pt.sem < 0) throw cell_error(6, "negative standard error");
        pt.n = count(7);
        agg.points.push_back(pt);
    }
    if (line_no == 0) throw ParseError(file + ": empty file");

    std::ifstream mf(meta_path, std::ios::binary);
    json meta;
    try {
        meta = json::parse(mf);
        agg.spec = run_spec_from_json(meta.at("run_spec"));
        agg.code_version = meta.at("code_version").get<std::string>();
        agg.wall_seconds = meta.at("wall_clock_seconds").get<double>();
        if (meta.contains("config")) agg.config_echo = meta["config"].dump();
    } catch (const std::exception &e) {
        throw ParseError(meta_path.string() + ": invalid metadata: " + e.what());
    }
    return agg;
}

bool same_content(const EnsembleAggregate &a, const EnsembleAggregate &b) {
    return a.points == b.points && to_json(a.spec) == to_json(b.spec) && a.code_version == b.code_version &&
           a.config_echo == b.config_echo;
}

}  // namespace dmipt
