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

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "dmipt/json_io.h"

namespace dmipt {

using nlohmann::json;

namespace {

constexpr double kDefaultAreaP0 = 0.30995;
constexpr double kDefaultVolumeP0 = 0.00995;

const std::set<std::string> kCommonKeys = {"kind", "label", "out", "workers", "seed", "paper_scale", "constants"};
const std::set<std::string> kSimKeys = {"L",     "sizes",       "regions",     "observables", "n_traj",
                                        "T_eq", "layer_order", "ancilla_site"};
const std::set<std::string> kSteadyKeys = {"p", "p_range", "T_measure", "sample_every"};
const std::set<std::string> kRampKeys = {"p0",           "p_end",      "R",          "fixed_product",
                                         "product_of",   "grid_spacing", "initial_variant"};
const std::set<std::string> kAnalysisKeys = {"inputs", "mode", "observable", "region", "window", "asymptote"};

std::string fmt_g(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string fmt17(double v) { return fmt_g(v, 17); }

[[noreturn]] void bad(const std::string &key, const std::string &why) {
    throw ConfigError("config key '" + key + "': " + why);
}

void reject_unknown(const json &j, const std::set<std::string> &allowed, const std::string &where) {
    for (const auto &item : j.items()) {
        if (!allowed.count(item.key())) throw ConfigError("unknown config key '" + where + item.key() + "'");
    }
}

double get_double(const json &j, const std::string &key, std::optional<double> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        bad(key, "required");
    }
    if (!j[key].is_number()) bad(key, "expected a number");
    return j[key].get<double>();
}

size_t get_count(const json &j, const std::string &key, std::optional<size_t> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        bad(key, "required");
    }
    const json &v = j[key];
    if (!v.is_number_integer() || v.get<long long>() < 0) bad(key, "expected a non-negative integer");
    return v.get<size_t>();
}

std::string get_string(const json &j, const std::string &key, std::optional<std::string> fallback = std::nullopt) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        bad(key, "required");
    }
    if (!j[key].is_string()) bad(key, "expected a string");
    return j[key].get<std::string>();
}

// A number or a list of numbers.
std::vector<double> get_double_list(const json &j, const std::string &key) {
    const json &v = j[key];
    std::vector<double> out;
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) bad(key, "expected a number or a non-empty list of numbers");
    for (const auto &e : v) {
        if (!e.is_number()) bad(key, "expected a list of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<size_t> get_count_list(const json &j, const std::string &key) {
    const json &v = j[key];
    if (v.is_number_integer() && v.get<long long>() > 0) return {v.get<size_t>()};
    if (!v.is_array() || v.empty()) bad(key, "expected a positive integer or a non-empty list of them");
    std::vector<size_t> out;
    for (const auto &e : v) {
        if (!e.is_number_integer() || e.get<long long>() <= 0) bad(key, "expected positive integers");
        out.push_back(e.get<size_t>());
    }
    return out;
}

ExperimentKind parse_kind(const std::string &s) {
    for (ExperimentKind k : {ExperimentKind::kSteadySweep, ExperimentKind::kRampArea, ExperimentKind::kRampVolume,
                             ExperimentKind::kAncillaRamp, ExperimentKind::kI3Ramp, ExperimentKind::kAnalyze}) {
        if (experiment_kind_name(k) == s) return k;
    }
    bad("kind", "unknown experiment kind '" + s + "'");
}

ScalingConstants parse_constants(const json &config) {
    ScalingConstants c;
    if (!config.contains("constants")) return c;
    const json &j = config["constants"];
    if (!j.is_object()) bad("constants", "expected an object");
    reject_unknown(j, {"p_c", "nu", "z", "alpha"}, "constants.");
    c.p_c = get_double(j, "p_c", c.p_c);
    c.nu = get_double(j, "nu", c.nu);
    c.z = get_double(j, "z", c.z);
    c.alpha = get_double(j, "alpha", c.alpha);
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        bad("constants", e.what());
    }
    return c;
}

ObservableSet parse_observables(const json &config, ExperimentKind kind, std::vector<size_t> regions) {
    std::vector<std::string> names;
    if (config.contains("observables")) {
        const json &v = config["observables"];
        if (!v.is_array() || v.empty()) bad("observables", "expected a non-empty list of names");
        for (const auto &e : v) {
            if (!e.is_string()) bad("observables", "expected names");
            names.push_back(e.get<std::string>());
        }
    } else {
        switch (kind) {
            case ExperimentKind::kSteadySweep:
                names = {"S_half"};
                break;
            case ExperimentKind::kAncillaRamp:
                names = {"S_Q"};
                break;
            case ExperimentKind::kI3Ramp:
                names = {"I3"};
                break;
            default:
                names = {regions.empty() ? "S_half" : "S_region"};
        }
    }
    ObservableSet obs;
    for (const auto &n : names) {
        ObservableKind k;
        try {
            k = parse_observable(n);
        } catch (const std::invalid_argument &) {
            bad("observables", "unknown observable '" + n + "' (expected S_region, S_half, I3 or S_Q)");
        }
        switch (k) {
            case ObservableKind::kSRegion:
                if (regions.empty()) bad("regions", "S_region needs a list of region sizes");
                obs.regions = regions;
                break;
            case ObservableKind::kSHalf:
                obs.s_half = true;
                break;
            case ObservableKind::kI3:
                obs.i3 = true;
                break;
            case ObservableKind::kSQ:
                obs.s_q = true;
                break;
        }
    }
    return obs;
}

InitialVariant parse_variant(const json &config) {
    InitialVariant v;
    if (!config.contains("initial_variant")) return v;
    const json &j = config["initial_variant"];
    if (!j.is_object()) bad("initial_variant", "expected an object {kind, p_alt}");
    reject_unknown(j, {"kind", "p_alt"}, "initial_variant.");
    const std::string kind = get_string(j, "kind", std::string("steady"));
    if (kind == "steady") {
        v.kind = InitialVariant::Kind::kSteady;
    } else if (kind == "alternate_start") {
        v.kind = InitialVariant::Kind::kAlternateStart;
    } else if (kind == "quench_from_alternate") {
        v.kind = InitialVariant::Kind::kQuenchFromAlternate;
    } else {
        bad("initial_variant.kind", "expected steady, alternate_start or quench_from_alternate");
    }
    if (v.kind != InitialVariant::Kind::kSteady) v.p_alt = get_double(j, "p_alt");
    return v;
}

struct SimCommon {
    std::vector<size_t> sizes;
    std::vector<size_t> regions;
    size_t n_traj;
    uint64_t seed;
    std::optional<size_t> t_eq;
    LayerOrder order;
    std::optional<size_t> ancilla_site;
    ScalingConstants constants;
};

SimCommon parse_common(const json &config) {
    SimCommon c;
    if (config.contains("L") && config.contains("sizes")) bad("sizes", "give either L or sizes, not both");
    if (config.contains("L")) {
        c.sizes = {get_count(config, "L")};
    } else if (config.contains("sizes")) {
        c.sizes = get_count_list(config, "sizes");
    } else {
        bad("L", "required (or 'sizes')");
    }
    for (size_t L : c.sizes) {
        if (L < 2 || L % 2) bad(config.contains("L") ? "L" : "sizes", "system sizes must be even and >= 2");
    }
    if (config.contains("regions")) c.regions = get_count_list(config, "regions");
    c.n_traj = get_count(config, "n_traj", size_t{100});
    if (c.n_traj < 1) bad("n_traj", "must be >= 1");
    if (config.contains("seed") && !config["seed"].is_number_unsigned() && !config["seed"].is_number_integer())
        bad("seed", "expected an unsigned 64-bit integer");
    c.seed = config.contains("seed") ? config["seed"].get<uint64_t>() : 1;
    if (config.contains("T_eq")) {
        c.t_eq = get_count(config, "T_eq");
        if (*c.t_eq < 1) bad("T_eq", "must be >= 1");
    }
    const std::string order = get_string(config, "layer_order", std::string("unitary_first"));
    if (order == "unitary_first") {
        c.order = LayerOrder::kUnitaryFirst;
    } else if (order == "measurement_first") {
        c.order = LayerOrder::kMeasurementFirst;
    } else {
        bad("layer_order", "expected unitary_first or measurement_first");
    }
    if (config.contains("ancilla_site")) c.ancilla_site = get_count(config, "ancilla_site");
    c.constants = parse_constants(config);
    return c;
}

void check_plan(RunSpec &spec, const std::string &context) {
    try {
        spec.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(context + ": " + e.what());
    }
}

std::vector<RunSpec> expand_steady(const json &config, const SimCommon &c, const std::string &prefix) {
    std::vector<double> ps;
    if (config.contains("p") && config.contains("p_range")) bad("p_range", "give either p or p_range, not both");
    if (config.contains("p")) {
        ps = get_double_list(config, "p");
    } else if (config.contains("p_range")) {
        const json &r = config["p_range"];
        if (!r.is_object()) bad("p_range", "expected {from, to, step}");
        reject_unknown(r, {"from", "to", "step"}, "p_range.");
        const double from = get_double(r, "from"), to = get_double(r, "to"), step = get_double(r, "step");
        if (!(step > 0) || to < from) bad("p_range", "needs step > 0 and to >= from");
        const auto n = static_cast<size_t>(std::floor((to - from) / step + 1e-9)) + 1;
        for (size_t i = 0; i < n; i++) ps.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
    } else {
        bad("p", "steady_sweep needs p or p_range");
    }
    const size_t t_measure = get_count(config, "T_measure", size_t{0});
    const size_t every = get_count(config, "sample_every", size_t{1});
    if (every < 1) bad("sample_every", "must be >= 1");

    std::vector<RunSpec> out;
    for (size_t L : c.sizes) {
        for (double p : ps) {
            if (!(p >= 0 && p <= 1)) bad("p", "probabilities must lie in [0, 1]");
            RunSpec spec;
            spec.label = prefix + "L" + std::to_string(L) + "_p" + fmt_g(p);
            TrajectoryPlan &plan = spec.plan;
            plan.config = {L, c.order};
            plan.schedule = DrivingSchedule::constant(p, c.constants.p_c);
            plan.observables = parse_observables(config, ExperimentKind::kSteadySweep, c.regions);
            plan.t_eq = c.t_eq.value_or(2 * L);
            plan.t_measure = t_measure;
            plan.sample_every = every;
            plan.ancilla_site = c.ancilla_site;
            spec.n_traj = c.n_traj;
            spec.steady_average = true;
            check_plan(spec, spec.label);
            out.push_back(std::move(spec));
        }
    }
    return out;
}

std::vector<RunSpec> expand_ramp(const json &config, ExperimentKind kind, const SimCommon &c,
                                 const std::string &prefix) {
    std::vector<Direction> directions;
    if (kind == ExperimentKind::kRampArea) {
        directions = {Direction::kFromArea};
    } else if (kind == ExperimentKind::kRampVolume) {
        directions = {Direction::kFromVolume};
    } else {
        const std::string d =
            get_string(config, "direction", std::string(kind == ExperimentKind::kAncillaRamp ? "from_volume" : "both"));
        if (d == "from_area") {
            directions = {Direction::kFromArea};
        } else if (d == "from_volume") {
            directions = {Direction::kFromVolume};
        } else if (d == "both") {
            directions = {Direction::kFromArea, Direction::kFromVolume};
            if (config.contains("p0") || config.contains("p_end"))
                bad("p0", "direction 'both' uses the default start points; drop p0 / p_end");
        } else {
            bad("direction", "expected from_area, from_volume or both");
        }
    }

    const bool has_R = config.contains("R");
    const bool has_fp = config.contains("fixed_product");
    if (has_R == has_fp) bad("R", "give exactly one of R and fixed_product");
    const std::string default_product =
        (kind == ExperimentKind::kRampArea || kind == ExperimentKind::kRampVolume) ? "region" : "L";
    const std::string product_of = get_string(config, "product_of", default_product);
    if (product_of != "region" && product_of != "L") bad("product_of", "expected region or L");
    if (!has_fp && config.contains("product_of")) bad("product_of", "only meaningful with fixed_product");
    const double grid = get_double(config, "grid_spacing", 0.005);
    const InitialVariant variant = parse_variant(config);
    const double r = c.constants.r();

    struct Item {
        size_t L;
        std::vector<size_t> regions;
        double R;
    };
    std::vector<Item> items;
    if (has_R) {
        for (size_t L : c.sizes) {
            for (double R : get_double_list(config, "R")) items.push_back({L, c.regions, R});
        }
    } else {
        const double fp = get_double(config, "fixed_product");
        if (!(fp > 0)) bad("fixed_product", "must be positive");
        if (product_of == "L") {
            for (size_t L : c.sizes) items.push_back({L, c.regions, fp / std::pow(double(L), r)});
        } else {
            if (c.sizes.size() != 1) bad("sizes", "product_of 'region' needs a single L");
            if (c.regions.empty()) bad("regions", "product_of 'region' needs region sizes");
            for (size_t a : c.regions) items.push_back({c.sizes[0], {a}, fp / std::pow(double(a), r)});
        }
    }

    std::vector<RunSpec> out;
    for (Direction dir : directions) {
        const bool area = dir == Direction::kFromArea;
        double p0 = get_double(config, "p0", area ? kDefaultAreaP0 : kDefaultVolumeP0);
        if (area && !(p0 > c.constants.p_c)) {
            bad("p0", "p0 = " + fmt_g(p0) + " is not above p_c = " + fmt_g(c.constants.p_c) +
                          ", but this experiment drives from the area-law side");
        }
        if (!area && !(p0 < c.constants.p_c)) {
            bad("p0", "p0 = " + fmt_g(p0) + " is not below p_c = " + fmt_g(c.constants.p_c) +
                          ", but this experiment drives from the volume-law side");
        }
        std::optional<double> p_end;
        if (config.contains("p_end")) p_end = get_double(config, "p_end");
        for (const Item &it : items) {
            if (!(it.R > 0)) bad("R", "velocities must be positive");
            RunSpec spec;
            std::string label = prefix;
            if (directions.size() > 1) label += area ? "area_" : "volume_";
            label += "L" + std::to_string(it.L);
            if (it.regions.size() == 1) label += "_A" + std::to_string(it.regions[0]);
            label += "_R" + fmt_g(it.R);
            if (variant.kind == InitialVariant::Kind::kAlternateStart) label += "_alt" + fmt_g(variant.p_alt);
            if (variant.kind == InitialVariant::Kind::kQuenchFromAlternate) label += "_quench" + fmt_g(variant.p_alt);
            spec.label = label;
            TrajectoryPlan &plan = spec.plan;
            plan.config = {it.L, c.order};
            try {
                plan.schedule = DrivingSchedule::ramp(dir, p0, it.R, c.constants.p_c, p_end);
            } catch (const std::invalid_argument &e) {
                throw ConfigError(label + ": " + e.what());
            }
            plan.observables = parse_observables(config, kind, it.regions);
            plan.t_eq = c.t_eq.value_or(2 * it.L);
            plan.variant = variant;
            plan.grid_spacing = grid;
            plan.ancilla_site = c.ancilla_site;
            spec.n_traj = c.n_traj;
            check_plan(spec, label);
            out.push_back(std::move(spec));
        }
    }
    return out;
}

AnalysisSpec parse_analysis(const json &config) {
    AnalysisSpec a;
    a.constants = parse_constants(config);
    if (!config.contains("inputs")) bad("inputs", "required");
    const json &in = config["inputs"];
    if (in.is_string()) {
        a.inputs = {in.get<std::string>()};
    } else if (in.is_array()) {
        for (const auto &e : in) {
            if (!e.is_string()) bad("inputs", "expected glob strings");
            a.inputs.push_back(e.get<std::string>());
        }
    } else {
        bad("inputs", "expected a glob or a list of globs");
    }
    a.mode = get_string(config, "mode");
    if (a.mode != "fit_log" && a.mode != "fit_power_log" && a.mode != "fit_steady_alpha") {
        try {
            parse_collapse_mode(a.mode);
        } catch (const std::invalid_argument &) {
            bad("mode", "unknown mode '" + a.mode +
                            "' (expected BULK, VELOCITY, SIZE, DIMENSIONLESS, STEADY, CRITICAL_SLICE, fit_log, "
                            "fit_power_log or fit_steady_alpha)");
        }
    }
    if (config.contains("observable")) {
        try {
            a.observable = parse_observable(get_string(config, "observable"));
        } catch (const std::invalid_argument &e) {
            bad("observable", e.what());
        }
    }
    if (config.contains("region")) a.region = get_count(config, "region");
    if (config.contains("window")) {
        const json &w = config["window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
            bad("window", "expected [lo, hi]");
        a.window = FitWindow{w[0].get<double>(), w[1].get<double>()};
        if (!(a.window->lo < a.window->hi)) bad("window", "needs lo < hi");
    }
    if (config.contains("asymptote")) {
        const std::string f = get_string(config, "asymptote");
        if (f == "log") {
            a.asymptote = AsymptoteForm::kLog;
        } else if (f == "power") {
            a.asymptote = AsymptoteForm::kPower;
        } else {
            bad("asymptote", "expected log or power");
        }
    }
    a.label = get_string(config, "label", a.mode);
    return a;
}

// Writes `value` at the dotted path `key`, creating intermediate objects.
void set_path(json &config, const std::string &key, json value) {
    json *node = &config;
    size_t start = 0;
    for (;;) {
        const size_t dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override '" + key + "': empty key component");
        if (!node->is_object()) throw ConfigError("override '" + key + "': '" + part + "' is not inside an object");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
}

}  // namespace

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::kSteadySweep:
            return "steady_sweep";
        case ExperimentKind::kRampArea:
            return "ramp_area";
        case ExperimentKind::kRampVolume:
            return "ramp_volume";
        case ExperimentKind::kAncillaRamp:
            return "ancilla_ramp";
        case ExperimentKind::kI3Ramp:
            return "i3_ramp";
        case ExperimentKind::kAnalyze:
            return "analyze";
    }
    return "?";
}

void apply_override(json &config, const std::string &assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    set_path(config, key, std::move(value));
}

Experiment build_experiment(json config, const std::vector<std::string> &overrides, bool paper_scale) {
    if (!config.is_object()) throw ConfigError("configuration must be a JSON object");
    if (config.contains("paper_scale")) {
        const json block = config["paper_scale"];
        if (!block.is_object()) bad("paper_scale", "expected an object of overrides");
        config.erase("paper_scale");
        if (paper_scale) {
            for (const auto &item : block.items()) {
                if (item.key() == "kind") bad("paper_scale.kind", "the experiment kind cannot be overridden");
                config[item.key()] = item.value();
            }
        }
    }
    for (const auto &o : overrides) apply_override(config, o);

    Experiment e;
    e.kind = parse_kind(get_string(config, "kind"));
    std::set<std::string> allowed = kCommonKeys;
    if (e.kind == ExperimentKind::kAnalyze) {
        allowed.insert(kAnalysisKeys.begin(), kAnalysisKeys.end());
    } else {
        allowed.insert(kSimKeys.begin(), kSimKeys.end());
        if (e.kind == ExperimentKind::kSteadySweep) {
            allowed.insert(kSteadyKeys.begin(), kSteadyKeys.end());
        } else {
            allowed.insert(kRampKeys.begin(), kRampKeys.end());
            if (e.kind == ExperimentKind::kAncillaRamp || e.kind == ExperimentKind::kI3Ramp) allowed.insert("direction");
        }
    }
    reject_unknown(config, allowed, "");
    if (config.contains("out")) e.out = get_string(config, "out");
    e.workers = get_count(config, "workers", size_t{0});
    e.effective = config;

    if (e.kind == ExperimentKind::kAnalyze) {
        e.analysis = parse_analysis(config);
        return e;
    }
    const SimCommon common = parse_common(config);
    std::string prefix = config.contains("label") ? get_string(config, "label") + "_" : "";
    e.runs = e.kind == ExperimentKind::kSteadySweep ? expand_steady(config, common, prefix)
                                                    : expand_ramp(config, e.kind, common, prefix);
    std::set<std::string> labels;
    for (size_t i = 0; i < e.runs.size(); i++) {
        e.runs[i].master_seed = trajectory_seed(common.seed, i);
        if (!labels.insert(e.runs[i].label).second) throw ConfigError("two runs share the label '" + e.runs[i].label + "'");
    }
    return e;
}

Experiment load_experiment(const std::filesystem::path &path, const std::vector<std::string> &overrides,
                           bool paper_scale) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    json config = json::parse(f, nullptr, false);
    if (config.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
    return build_experiment(std::move(config), overrides, paper_scale);
}

std::filesystem::path run_output_path(const Experiment &e, const RunSpec &spec) {
    return e.out / experiment_kind_name(e.kind) / (spec.label + ".csv");
}

std::vector<RunSummary> execute_runs(const Experiment &e, std::ostream *log) {
    std::vector<RunSummary> out;
    // Where the files go and how many threads ran do not change their content.
    nlohmann::json content = e.effective;
    content.erase("out");
    content.erase("workers");
    const std::string echo = content.dump();
    for (const auto &spec : e.runs) {
        EnsembleAggregate agg = run_ensemble(spec, e.workers);
        agg.config_echo = echo;
        const auto path = run_output_path(e, spec);
        write_aggregate(agg, path);
        RunSummary s{spec.label, path, agg.points.size(), agg.wall_seconds};
        if (log) {
            *log << s.label << ": " << spec.n_traj << " trajectories, " << s.rows << " rows, "
                 << fmt_g(s.wall_seconds, 3) << " s -> " << s.csv.string() << '\n';
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::filesystem::path> expand_globs(const std::vector<std::string> &patterns) {
    std::set<std::filesystem::path> found;
    for (const auto &pattern : patterns) {
        glob_t g{};
        if (glob(pattern.c_str(), 0, nullptr, &g) == 0) {
            for (size_t i = 0; i < g.gl_pathc; i++) found.insert(g.gl_pathv[i]);
        }
        globfree(&g);
    }
    return {found.begin(), found.end()};
}

namespace {

std::string opt_cell(const std::optional<double> &v) { return v ? fmt17(*v) : ""; }

json fit_json(const FitResult &f) {
    json params = json::array();
    for (const auto &p : f.params) params.push_back({{"name", p.name}, {"value", p.value}, {"sigma", p.sigma}});
    return {{"model", f.model},       {"parameters", params},          {"rss", f.rss},
            {"chi2_per_dof", f.chi2_per_dof}, {"window", {f.window.lo, f.window.hi}}, {"n_points", f.n_points},
            {"weighted", f.weighted}, {"large_residual", f.large_residual}};
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

// (aggregate, region) pairs carrying the requested observable.
struct Selected {
    const EnsembleAggregate *agg;
    size_t region;
};

std::vector<Selected> select(const std::vector<EnsembleAggregate> &aggs, ObservableKind kind,
                             std::optional<size_t> region) {
    std::vector<Selected> out;
    for (const auto &agg : aggs) {
        std::set<size_t> regions;
        for (const auto &pt : agg.points) {
            if (pt.observable == kind && (!region || pt.region_size == *region)) regions.insert(pt.region_size);
        }
        for (size_t r : regions) out.push_back({&agg, r});
    }
    return out;
}

using GroupKey = std::tuple<size_t, size_t, int>;  // L, region, direction

std::map<GroupKey, std::vector<EnsembleAggregate>> group(const std::vector<Selected> &sel) {
    std::map<GroupKey, std::vector<EnsembleAggregate>> out;
    for (const auto &s : sel) {
        const auto &sched = s.agg->spec.plan.schedule;
        const int dir = sched.is_ramp() ? static_cast<int>(sched.direction()) : -1;
        out[{s.agg->spec.plan.config.L, s.region, dir}].push_back(*s.agg);
    }
    return out;
}

std::string curves_csv(const std::vector<Curve> &curves) {
    std::string out = "curve,R,region_size,L,x,y,y_err\n";
    for (size_t i = 0; i < curves.size(); i++) {
        const CurveLabel &l = curves[i].label;
        for (const auto &p : curves[i].points) {
            out += std::to_string(i) + ',' + opt_cell(l.R) + ',' + opt_cell(l.region_size) + ',' + opt_cell(l.L) + ',' +
                   fmt17(p.x) + ',' + fmt17(p.y) + ',' + fmt17(p.y_err) + '\n';
        }
    }
    return out;
}

}  // namespace

AnalysisSummary execute_analysis(const Experiment &e, std::ostream *log) {
    const AnalysisSpec &a = e.analysis;
    const auto paths = expand_globs(a.inputs);
    std::vector<EnsembleAggregate> aggs;
    for (const auto &p : paths) {
        if (p.extension() == ".csv") aggs.push_back(read_aggregate(p));
    }
    if (aggs.empty()) throw ConfigError("no inputs match " + json(a.inputs).dump());

    ObservableKind kind = a.observable.value_or(aggs.front().points.empty() ? ObservableKind::kSHalf
                                                                            : aggs.front().points.front().observable);
    const auto sel = select(aggs, kind, a.region);
    if (sel.empty()) throw ConfigError("inputs hold no rows for observable " + observable_name(kind));

    json report = {{"mode", a.mode}, {"constants", to_json(a.constants)}, {"observable", observable_name(kind)}};
    json inputs = json::array();
    for (const auto &p : paths) inputs.push_back(p.string());
    report["inputs"] = inputs;
    std::string csv;

    const bool is_fit = a.mode.rfind("fit_", 0) == 0;
    if (is_fit) {
        std::vector<CurvePoint> pts;
        if (a.mode == "fit_steady_alpha") {
            if (aggs.size() != 1) throw ConfigError("fit_steady_alpha takes exactly one steady-state aggregate");
            for (const auto &s : sel) {
                const auto rows = s.agg->series(kind, s.region);
                if (rows.size() != 1) throw ConfigError("fit_steady_alpha needs one time-averaged row per region");
                pts.push_back({double(s.region), rows[0].mean, rows[0].sem});
            }
            std::sort(pts.begin(), pts.end(), [](auto &x, auto &y) { return x.x < y.x; });
        } else {
            const auto groups = group(sel);
            if (groups.size() != 1) {
                throw ConfigError("inputs hold " + std::to_string(groups.size()) +
                                  " critical slices; select one with 'region' or narrower inputs");
            }
            pts = critical_slice(groups.begin()->second, kind, std::get<1>(groups.begin()->first)).points;
        }
        FitResult fit = a.mode == "fit_log"         ? fit_log(pts, a.window)
                        : a.mode == "fit_power_log" ? fit_power_log(pts, a.window)
                                                    : fit_steady_alpha(pts);
        report["fit"] = fit_json(fit);
        csv = "x,y,y_err\n";
        for (const auto &p : pts) csv += fmt17(p.x) + ',' + fmt17(p.y) + ',' + fmt17(p.y_err) + '\n';
        if (log) {
            *log << a.label << ": " << fit.model;
            for (const auto &p : fit.params) *log << "  " << p.name << " = " << fmt_g(p.value) << " +- " << fmt_g(p.sigma, 3);
            *log << "  window [" << fmt_g(fit.window.lo) << ", " << fmt_g(fit.window.hi) << "]\n";
        }
    } else {
        const CollapseMode mode = parse_collapse_mode(a.mode);
        std::vector<Curve> curves;
        if (mode == CollapseMode::kSteady) {
            for (const auto &[key, group_aggs] : group(sel)) curves.push_back(steady_curve(group_aggs, kind, std::get<1>(key)));
        } else if (mode == CollapseMode::kCriticalSlice) {
            for (const auto &[key, group_aggs] : group(sel))
                curves.push_back(critical_slice(group_aggs, kind, std::get<1>(key)));
        } else {
            for (const auto &s : sel) curves.push_back(curve_from_aggregate(*s.agg, kind, s.region));
        }
        CollapseResult res;
        try {
            res = rescale_fts(curves, a.constants, mode);
        } catch (const std::invalid_argument &err) {
            throw ConfigError(err.what());
        }
        report["quality"] = res.quality;
        report["quality_unrescaled"] = res.quality_unrescaled;
        report["improvement"] = res.improvement();
        report["curves"] = curves.size();
        if (a.asymptote) report["asymptote"] = fit_json(asymptote_check(res, *a.asymptote));
        csv = curves_csv(res.curves);
        if (log) {
            *log << a.label << ": " << curves.size() << " curves, quality " << fmt_g(res.quality_unrescaled, 4) << " -> "
                 << fmt_g(res.quality, 4) << " (x" << fmt_g(res.improvement(), 4) << ")\n";
        }
    }

    AnalysisSummary out;
    out.csv = e.out / "analyze" / (a.label + ".csv");
    out.report = e.out / "analyze" / (a.label + ".report.json");
    write_text(out.csv, csv);
    write_text(out.report, report.dump(2) + "\n");
    out.report_json = std::move(report);
    return out;
}

}  // namespace dmipt
