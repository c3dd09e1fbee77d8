// Copyright 2026 The lataddr Authors
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

#include "lataddr/cli_reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "lataddr/errors.hpp"

namespace lataddr {

using nlohmann::json;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Enum <-> name tables. Config strings use these spellings.
constexpr std::pair<Scenario, std::string_view> kScenarioNames[] = {
    {Scenario::stirap_scan, "stirap-scan"},
    {Scenario::quench, "quench"},
    {Scenario::rotate, "rotate"},
    {Scenario::measure, "measure"},
    {Scenario::cphase, "cphase"},
    {Scenario::pattern_load, "pattern-load"},
    {Scenario::precision_budget, "precision-budget"},
    {Scenario::protocol_script, "protocol-script"},
};

constexpr std::pair<ScriptOp, std::string_view> kOpNames[] = {
    {ScriptOp::quench, "quench"},
    {ScriptOp::inverse_quench, "inverse_quench"},
    {ScriptOp::rotate_z, "rotate_z"},
    {ScriptOp::rotate_x, "rotate_x"},
    {ScriptOp::hadamard, "hadamard"},
    {ScriptOp::measure, "measure"},
    {ScriptOp::cphase, "cphase"},
    {ScriptOp::controlled_rotation, "controlled_rotation"},
    {ScriptOp::pump, "pump"},
};

template <class E, std::size_t M>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[M], E value) {
    for (const auto &[v, name] : table) {
        if (v == value) return name;
    }
    return "?";
}

template <class E, std::size_t M>
std::string choices(const std::pair<E, std::string_view> (&table)[M]) {
    std::string out;
    for (const auto &[v, name] : table) {
        out += out.empty() ? "" : ", ";
        out += name;
    }
    return out;
}

std::string_view mode_name(OperationMode m) {
    return m == OperationMode::ideal ? "ideal" : "simulated";
}
std::string_view method_name(QuenchMethod m) {
    return m == QuenchMethod::stirap ? "stirap" : "raman";
}
std::string_view integrator_name(IntegratorMethod m) {
    return m == IntegratorMethod::adaptive_rk45 ? "adaptive_rk45" : "fixed_rk4";
}
std::string_view pump_mode_name(PumpMode m) {
    return m == PumpMode::deterministic ? "deterministic" : "trajectory";
}
std::string_view level_name(SiteLevel l) {
    switch (l) {
    case SiteLevel::a: return "a";
    case SiteLevel::b: return "b";
    case SiteLevel::q: return "q";
    }
    return "?";
}

bool register_scenario(Scenario s) {
    return s == Scenario::quench || s == Scenario::rotate || s == Scenario::measure ||
           s == Scenario::cphase || s == Scenario::protocol_script;
}

// Reads one JSON object, remembers which keys were asked for and rejects the
// rest in finish().
class Reader {
  public:
    Reader(const json &object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) {
            throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
        }
    }

    std::string key(std::string_view name) const {
        return path_.empty() ? std::string(name) : path_ + "." + std::string(name);
    }

    const json *find(std::string_view name) {
        seen_.emplace(name);
        const auto it = object_.find(std::string(name));
        if (it == object_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    double number(std::string_view name, double fallback) {
        return optional_number(name).value_or(fallback);
    }

    std::optional<double> optional_number(std::string_view name) {
        const json *v = find(name);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number()) throw ConfigError(key(name), "must be a number");
        const double x = v->get<double>();
        if (!std::isfinite(x)) throw ConfigError(key(name), "must be finite");
        return x;
    }

    std::optional<std::int64_t> optional_integer(std::string_view name) {
        const json *v = find(name);
        if (v == nullptr) return std::nullopt;
        if (v->is_number_unsigned()) {
            if (v->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
                throw ConfigError(key(name), "integer out of range");
            }
            return static_cast<std::int64_t>(v->get<std::uint64_t>());
        }
        if (!v->is_number_integer()) throw ConfigError(key(name), "must be an integer");
        return v->get<std::int64_t>();
    }

    std::int64_t integer(std::string_view name, std::int64_t fallback) {
        return optional_integer(name).value_or(fallback);
    }

    std::uint64_t unsigned_integer(std::string_view name, std::uint64_t fallback) {
        const json *v = find(name);
        if (v == nullptr) return fallback;
        if (!v->is_number_unsigned()) {
            throw ConfigError(key(name), "must be a non-negative 64-bit integer");
        }
        return v->get<std::uint64_t>();
    }

    std::string string(std::string_view name, std::string_view fallback) {
        const json *v = find(name);
        if (v == nullptr) return std::string(fallback);
        if (!v->is_string()) throw ConfigError(key(name), "must be a string");
        return v->get<std::string>();
    }

    Reader child(std::string_view name) {
        static const json empty = json::object();
        const json *v = find(name);
        return Reader(v == nullptr ? empty : *v, key(name));
    }

    void finish() const {
        for (const auto &item : object_.items()) {
            if (!seen_.contains(item.key())) throw ConfigError(key(item.key()), "unknown key");
        }
    }

    const std::string &path() const { return path_; }

  private:
    const json &object_;
    std::string path_;
    std::set<std::string, std::less<>> seen_;
};

template <class E, std::size_t M>
E parse_enum(const std::pair<E, std::string_view> (&table)[M], const std::string &text,
             const std::string &key) {
    for (const auto &[v, name] : table) {
        if (name == text) return v;
    }
    throw ConfigError(key, "must be one of: " + choices(table));
}

OperationMode parse_mode(const std::string &text, const std::string &key) {
    if (text == "ideal") return OperationMode::ideal;
    if (text == "simulated") return OperationMode::simulated;
    throw ConfigError(key, "must be one of: ideal, simulated");
}

PumpMode parse_pump_mode(const std::string &text, const std::string &key) {
    if (text == "deterministic") return PumpMode::deterministic;
    if (text == "trajectory") return PumpMode::trajectory;
    throw ConfigError(key, "must be one of: deterministic, trajectory");
}

void require(bool condition, const std::string &key, const std::string &constraint) {
    if (!condition) throw ConfigError(key, constraint);
}

WaveOptions read_wave(Reader r) {
    WaveOptions w;
    w.wavelength = r.optional_number("wavelength");
    w.tilt_angle = r.optional_number("tilt_angle");
    w.relative_phase = r.number("relative_phase", 0.0);
    w.peak_rabi = r.optional_number("peak_rabi");
    r.finish();
    if (w.wavelength) require(*w.wavelength > 0.0, r.key("wavelength"), "must be > 0");
    if (w.tilt_angle) {
        require(*w.tilt_angle >= 0.0 && *w.tilt_angle < kHalfPi, r.key("tilt_angle"),
                "must lie in [0, pi/2)");
    }
    if (w.peak_rabi) require(*w.peak_rabi >= 0.0, r.key("peak_rabi"), "must be >= 0");
    return w;
}

json wave_to_json(const WaveOptions &w) {
    auto opt = [](const std::optional<double> &v) { return v ? json(*v) : json(nullptr); };
    return {{"wavelength", opt(w.wavelength)},
            {"tilt_angle", opt(w.tilt_angle)},
            {"relative_phase", w.relative_phase},
            {"peak_rabi", opt(w.peak_rabi)}};
}

// Site labels for the initial register.
SiteVector site_label(const std::string &label, const std::string &key) {
    const double h = std::numbers::sqrt2 / 2.0;
    if (label == "a") return site_basis(SiteLevel::a);
    if (label == "b") return site_basis(SiteLevel::b);
    if (label == "q") return site_basis(SiteLevel::q);
    if (label == "plus") return {complex{h}, complex{h}, complex{}};
    if (label == "minus") return {complex{h}, complex{-h}, complex{}};
    throw ConfigError(key, "unknown site label '" + label + "' (a, b, q, plus, minus)");
}

ScriptStep read_step(Reader r, const LatticeConfig &lattice) {
    ScriptStep step;
    step.op = parse_enum(kOpNames, r.string("op", ""), r.key("op"));
    step.site = r.optional_integer("site");
    step.reach = r.optional_integer("reach");
    step.angle = r.number("angle", 0.0);
    if (const json *m = r.find("mode")) {
        require(m->is_string(), r.key("mode"), "must be a string");
        step.mode = parse_mode(m->get<std::string>(), r.key("mode"));
    }
    step.pump_mode = parse_pump_mode(r.string("pump_mode", "deterministic"), r.key("pump_mode"));
    r.finish();

    const std::int64_t k = step.site.value_or(lattice.target_site);
    const std::int64_t reach = step.reach.value_or(lattice.reach);
    require(k >= 0 && k < lattice.site_count, r.key("site"), "must lie in [0, N)");
    require(reach >= 1, r.key("reach"), "must be >= 1");
    if (step.op == ScriptOp::cphase || step.op == ScriptOp::controlled_rotation) {
        LatticeConfig local = lattice;
        local.target_site = k;
        local.reach = reach;
        for (const std::int64_t s : local.sublattice()) {
            require(s + 1 < lattice.site_count, r.key("site"),
                    "every sublattice site needs a right neighbour inside the register");
        }
    }
    return step;
}

void validate_lattice(const LatticeConfig &lattice) {
    require(lattice.site_count >= 1, "lattice.N", "must be >= 1");
    require(lattice.reach >= 1, "lattice.L", "must be >= 1");
    require(lattice.target_site >= 0 && lattice.target_site < lattice.site_count, "lattice.k",
            "must lie in [0, N)");
    require(lattice.lamb_dicke >= 0.0, "lattice.eta", "must be >= 0");
}

StandingWaveConfig resolve_wave(const WaveOptions &w, const RunConfig &config,
                                const std::string &key) {
    StandingWaveConfig wave;
    const double period = config.lattice.commensurate_period();
    wave.wavelength = w.wavelength.value_or(period);
    if (w.tilt_angle) {
        wave.tilt_angle = *w.tilt_angle;
    } else {
        require(wave.wavelength <= period, key + ".wavelength",
                "must not exceed 2 (L + 1) when tilt_angle is derived");
        wave.tilt_angle = commensurate_angle(wave.wavelength, config.lattice.reach);
    }
    wave.relative_phase = w.relative_phase;
    wave.peak_rabi =
        w.peak_rabi.value_or(calibrated_peak_rabi(config.lattice, config.neighbour_peak));
    return wave;
}

json step_report_to_json(const StepReport &r) {
    return {{"leakage", r.leakage},
            {"residual_b", r.residual_b},
            {"neighbour_phase_error", r.neighbour_phase_error},
            {"pulse_duration", r.pulse_duration},
            {"quench_pairs", r.quench_pairs}};
}

std::string dump(const json &document) { return document.dump(2) + "\n"; }

std::string register_to_csv(const LatticeRegister &reg) {
    std::string out = "site,occupied,population_a,population_b,population_q\n";
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        out += std::to_string(s) + "," + (reg.occupied(s) ? "1" : "0") + "," +
               format_number(reg.population(s, SiteLevel::a)) + "," +
               format_number(reg.population(s, SiteLevel::b)) + "," +
               format_number(reg.population(s, SiteLevel::q)) + "\n";
    }
    return out;
}

std::string render_register(const RunConfig &config, const LatticeRegister &reg,
                            json extra) {
    if (config.output_format == OutputFormat::csv) return register_to_csv(reg);
    extra["scenario"] = to_string(config.scenario);
    extra["register"] = register_to_json(reg);
    return dump(extra);
}

std::string render_scan(const RunConfig &config) {
    const FidelityCurve curve = fidelity_scan(config.scan.omega_min, config.scan.omega_max,
                                              config.scan.points, drive_settings(config));
    if (config.output_format == OutputFormat::csv) return curve_to_csv(curve);
    json doc = curve_to_json(curve);
    doc["scenario"] = to_string(config.scenario);
    doc["threshold_fidelity"] = config.scan.threshold_fidelity;
    try {
        doc["threshold"] = find_threshold(curve, config.scan.threshold_fidelity);
    } catch (const std::out_of_range &) {
        doc["threshold"] = nullptr;
    }
    const auto crossing = curve.crossing();
    doc["crossing"] = crossing ? json(*crossing) : json(nullptr);
    return dump(doc);
}

std::string render_budget(const RunConfig &config) {
    const auto &lattice = config.lattice;
    const auto &b = config.budget;
    double tilt = 0.0;
    if (b.tilt_angle) {
        tilt = *b.tilt_angle;
    } else {
        require(b.wavelength <= lattice.commensurate_period(), "budget.wavelength",
                "must not exceed 2 (L + 1) when budget.theta is derived");
        tilt = commensurate_angle(b.wavelength, lattice.reach);
    }
    const PrecisionBudget geometric =
        evaluate_budget(lattice.site_count, tilt, b.angle_error, b.phase_error, lattice.reach);
    const AsymptoticBudget asymptotic =
        asymptotic_budget(lattice.reach, lattice.site_count, b.angle_error, b.phase_error);
    const double dtheta_max = max_angle_error(lattice.reach, lattice.site_count, b.phase_error);

    if (config.output_format == OutputFormat::csv) {
        std::string out = "quantity,value\n";
        auto row = [&](std::string_view name, double v) {
            out += std::string(name) + "," + format_number(v) + "\n";
        };
        row("N", static_cast<double>(lattice.site_count));
        row("L", static_cast<double>(lattice.reach));
        row("theta", tilt);
        row("dtheta", b.angle_error);
        row("dphi", b.phase_error);
        row("feasible", asymptotic.feasible ? 1.0 : 0.0);
        row("asymptotic_lhs", asymptotic.lhs);
        row("asymptotic_margin", asymptotic.margin);
        row("max_angle_error", dtheta_max);
        row("node_displacement", geometric.node_displacement);
        row("required_precision", geometric.required_precision);
        row("geometric_feasible", geometric.feasible ? 1.0 : 0.0);
        return out;
    }
    json doc = {
        {"scenario", to_string(config.scenario)},
        {"N", lattice.site_count},
        {"L", lattice.reach},
        {"theta", tilt},
        {"dtheta", b.angle_error},
        {"dphi", b.phase_error},
        {"feasible", asymptotic.feasible},
        {"asymptotic",
         {{"lhs", asymptotic.lhs}, {"margin", asymptotic.margin}, {"feasible", asymptotic.feasible}}},
        {"max_angle_error", dtheta_max},
        {"geometric",
         {{"node_displacement", geometric.node_displacement},
          {"required_precision", geometric.required_precision},
          {"feasible", geometric.feasible}}},
    };
    return dump(doc);
}

std::string render_pattern(const RunConfig &config) {
    const auto &l = config.lattice;
    const std::vector<bool> occupancy = pattern_load(l.site_count, l.target_site, l.reach);
    if (config.output_format == OutputFormat::csv) {
        std::string out = "site,occupied\n";
        for (std::size_t s = 0; s < occupancy.size(); ++s) {
            out += std::to_string(s) + "," + (occupancy[s] ? "1" : "0") + "\n";
        }
        return out;
    }
    json sites = json::array();
    for (std::size_t s = 0; s < occupancy.size(); ++s) {
        if (occupancy[s]) sites.push_back(s);
    }
    return dump({{"scenario", to_string(config.scenario)},
                 {"occupancy", occupancy},
                 {"occupied_sites", sites}});
}

std::string render_measure(const RunConfig &config) {
    const AddressingProtocol protocol(protocol_setup(config));
    const LatticeRegister initial = initial_register(config);
    const auto &l = config.lattice;
    const auto &p = config.protocol;

    std::vector<MeasurementResult> results;
    results.reserve(p.trials);
    std::optional<LatticeRegister> last;
    for (std::size_t t = 0; t < p.trials; ++t) {
        LatticeRegister reg = initial;
        results.push_back(protocol.measure(reg, l.target_site, l.reach,
                                           derive_stream_seed(config.seed, t), p.mode));
        if (t + 1 == p.trials) last = std::move(reg);
    }
    std::size_t bright = 0;
    for (const auto &r : results) bright += r.bright ? 1 : 0;
    const double frequency =
        results.empty() ? 0.0 : static_cast<double>(bright) / static_cast<double>(results.size());

    if (config.output_format == OutputFormat::csv) {
        std::string out = "trial,bright,bright_probability,neighbour_bright_population\n";
        for (std::size_t t = 0; t < results.size(); ++t) {
            out += std::to_string(t) + "," + (results[t].bright ? "1" : "0") + "," +
                   format_number(results[t].bright_probability) + "," +
                   format_number(results[t].neighbour_bright_population) + "\n";
        }
        return out;
    }
    json outcomes = json::array();
    for (const auto &r : results) outcomes.push_back(r.bright ? 1 : 0);
    json doc = {{"scenario", to_string(config.scenario)},
                {"trials", results.size()},
                {"bright_count", bright},
                {"bright_frequency", frequency},
                {"bright_probability", results.front().bright_probability},
                {"neighbour_bright_population", results.front().neighbour_bright_population},
                {"outcomes", outcomes},
                {"report", step_report_to_json(results.front().report)}};
    if (p.trials == 1) doc["register"] = register_to_json(*last);
    return dump(doc);
}

std::string render_script(const RunConfig &config) {
    const AddressingProtocol protocol(protocol_setup(config));
    LatticeRegister reg = initial_register(config);
    const auto &l = config.lattice;
    const auto &p = config.protocol;

    json steps = json::array();
    std::string csv = "step,op,site,reach,leakage,quench_pairs,outcome,norm_deficit\n";
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        const ScriptStep &step = p.steps[i];
        const std::int64_t k = step.site.value_or(l.target_site);
        const std::int64_t reach = step.reach.value_or(l.reach);
        const OperationMode mode = step.mode.value_or(p.mode);
        const std::uint64_t stream = derive_stream_seed(config.seed, i);
        json entry = {{"op", name_of(kOpNames, step.op)}, {"site", k}, {"reach", reach}};
        StepReport report;
        std::string outcome;
        switch (step.op) {
        case ScriptOp::quench: report = protocol.quench(reg, k, reach, mode); break;
        case ScriptOp::inverse_quench: report = protocol.inverse_quench(reg, k, reach, mode); break;
        case ScriptOp::rotate_z: report = protocol.rotate_z(reg, k, reach, step.angle, mode); break;
        case ScriptOp::rotate_x: report = protocol.rotate_x(reg, k, reach, step.angle, mode); break;
        case ScriptOp::hadamard: collective_hadamard(reg); break;
        case ScriptOp::cphase: report = protocol.collective_cphase(reg, k, reach, mode); break;
        case ScriptOp::controlled_rotation:
            report = protocol.controlled_rotation(reg, k, reach, step.angle, mode);
            break;
        case ScriptOp::measure: {
            const MeasurementResult m = protocol.measure(reg, k, reach, stream, mode);
            report = m.report;
            outcome = m.bright ? "bright" : "dark";
            entry["bright"] = m.bright;
            entry["bright_probability"] = m.bright_probability;
            break;
        }
        case ScriptOp::pump: {
            const PumpReport pump = optical_pump(reg, stream, step.pump_mode, p.pump_target);
            report.leakage = pump.leakage;
            entry["pumped_weight"] = pump.pumped_weight;
            entry["pumped_sites"] = pump.pumped_sites;
            break;
        }
        }
        if (step.op == ScriptOp::rotate_z || step.op == ScriptOp::rotate_x ||
            step.op == ScriptOp::controlled_rotation) {
            entry["angle"] = step.angle;
        }
        entry["report"] = step_report_to_json(report);
        entry["norm_deficit"] = reg.norm_deficit();
        steps.push_back(std::move(entry));
        csv += std::to_string(i) + "," + std::string(name_of(kOpNames, step.op)) + "," +
               std::to_string(k) + "," + std::to_string(reach) + "," +
               format_number(report.leakage) + "," + std::to_string(report.quench_pairs) + "," +
               outcome + "," + format_number(reg.norm_deficit()) + "\n";
    }
    if (config.output_format == OutputFormat::csv) return csv;
    return dump({{"scenario", to_string(config.scenario)},
                 {"steps", steps},
                 {"register", register_to_json(reg)}});
}

} // namespace

std::string_view to_string(Scenario scenario) { return name_of(kScenarioNames, scenario); }

RunConfig parse_config(std::string_view text) {
    json document;
    try {
        document = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config_document(document);
}

RunConfig parse_config_document(const json &document) {
    RunConfig c;
    Reader root(document, "");
    c.scenario = parse_enum(kScenarioNames, root.string("scenario", "stirap-scan"), "scenario");
    c.seed = root.unsigned_integer("seed", 0);
    c.output_path = root.string("output_path", "");
    const std::string format = root.string("output_format", "csv");
    if (format == "csv") {
        c.output_format = OutputFormat::csv;
    } else if (format == "json") {
        c.output_format = OutputFormat::json;
    } else {
        throw ConfigError("output_format", "must be one of: csv, json");
    }
    c.neighbour_peak = root.number("neighbour_peak", c.neighbour_peak);
    require(c.neighbour_peak >= 0.0, "neighbour_peak", "must be >= 0");
    c.delta_q = root.number("delta_q", c.delta_q);
    c.gamma_q = root.number("gamma_q", c.gamma_q);
    require(c.gamma_q >= 0.0, "gamma_q", "must be >= 0");

    {
        Reader r = root.child("lattice");
        c.lattice.site_count = r.integer("N", c.lattice.site_count);
        c.lattice.target_site = r.integer("k", c.lattice.target_site);
        c.lattice.reach = r.integer("L", c.lattice.reach);
        c.lattice.lamb_dicke = r.number("eta", c.lattice.lamb_dicke);
        r.finish();
        validate_lattice(c.lattice);
    }
    c.wave_b = read_wave(root.child("wave_b"));
    c.wave_q = read_wave(root.child("wave_q"));
    {
        Reader r = root.child("pulses");
        c.pulses.center_b = r.number("t1", c.pulses.center_b);
        c.pulses.center_q = r.number("t2", c.pulses.center_q);
        c.pulses.width = r.number("delta_t", c.pulses.width);
        c.pulses.cutoff_widths = r.number("cutoff", c.pulses.cutoff_widths);
        r.finish();
        require(c.pulses.width > 0.0, "pulses.delta_t", "must be > 0");
        require(c.pulses.cutoff_widths > 0.0, "pulses.cutoff", "must be > 0");
    }
    {
        Reader r = root.child("integrator");
        const std::string method = r.string("method", "adaptive_rk45");
        if (method == "adaptive_rk45") {
            c.integrator.method = IntegratorMethod::adaptive_rk45;
        } else if (method == "fixed_rk4") {
            c.integrator.method = IntegratorMethod::fixed_rk4;
        } else {
            throw ConfigError("integrator.method", "must be one of: adaptive_rk45, fixed_rk4");
        }
        c.integrator.rel_tol = r.number("rel_tol", c.integrator.rel_tol);
        c.integrator.abs_tol = r.number("abs_tol", c.integrator.abs_tol);
        c.integrator.max_step = r.number("max_step", c.integrator.max_step);
        r.finish();
        require(c.integrator.rel_tol > 0.0, "integrator.rel_tol", "must be > 0");
        require(c.integrator.abs_tol > 0.0, "integrator.abs_tol", "must be > 0");
        require(c.integrator.max_step > 0.0, "integrator.max_step", "must be > 0");
    }
    {
        Reader r = root.child("scan");
        c.scan.omega_min = r.number("omega_min", c.scan.omega_min);
        c.scan.omega_max = r.number("omega_max", c.scan.omega_max);
        const std::int64_t points = r.integer("points", static_cast<std::int64_t>(c.scan.points));
        c.scan.threshold_fidelity = r.number("threshold_fidelity", c.scan.threshold_fidelity);
        r.finish();
        require(c.scan.omega_min >= 0.0, "scan.omega_min", "must be >= 0");
        require(c.scan.omega_max >= c.scan.omega_min, "scan.omega_max", "must be >= omega_min");
        require(points >= 2, "scan.points", "must be >= 2");
        c.scan.points = static_cast<std::size_t>(points);
        require(c.scan.threshold_fidelity > 0.0 && c.scan.threshold_fidelity <= 1.0,
                "scan.threshold_fidelity", "must lie in (0, 1]");
    }
    {
        Reader r = root.child("beam");
        c.beam.rabi = r.number("rabi", c.beam.rabi);
        c.beam.detuning = r.number("detuning", c.beam.detuning);
        c.beam.decay = r.number("decay", c.beam.decay);
        c.beam.waist = r.number("waist", c.beam.waist);
        r.finish();
        require(c.beam.detuning != 0.0, "beam.detuning", "must be nonzero");
        require(c.beam.decay >= 0.0, "beam.decay", "must be >= 0");
        require(c.beam.waist >= 0.0, "beam.waist", "must be >= 0 (0 selects L / 2)");
    }
    {
        Reader r = root.child("budget");
        c.budget.tilt_angle = r.optional_number("theta");
        c.budget.wavelength = r.number("wavelength", c.budget.wavelength);
        c.budget.angle_error = r.number("dtheta", c.budget.angle_error);
        c.budget.phase_error = r.number("dphi", c.budget.phase_error);
        r.finish();
        if (c.budget.tilt_angle) {
            require(*c.budget.tilt_angle >= 0.0 && *c.budget.tilt_angle < kHalfPi, "budget.theta",
                    "must lie in [0, pi/2)");
        }
        require(c.budget.wavelength > 0.0, "budget.wavelength", "must be > 0");
        require(c.budget.angle_error >= 0.0, "budget.dtheta", "must be >= 0");
        require(c.budget.phase_error >= 0.0, "budget.dphi", "must be >= 0");
    }
    {
        Reader r = root.child("protocol");
        auto &p = c.protocol;
        p.mode = parse_mode(r.string("mode", "ideal"), "protocol.mode");
        const std::string method = r.string("quench_method", "stirap");
        if (method == "stirap") {
            p.quench_method = QuenchMethod::stirap;
        } else if (method == "raman") {
            p.quench_method = QuenchMethod::raman;
        } else {
            throw ConfigError("protocol.quench_method", "must be one of: stirap, raman");
        }
        const std::string axis = r.string("axis", "z");
        require(axis == "z" || axis == "x", "protocol.axis", "must be one of: z, x");
        p.axis = axis[0];
        p.angle = r.number("angle", p.angle);
        p.transfer_phase = r.number("transfer_phase", p.transfer_phase);

        if (const json *init = r.find("initial")) {
            p.initial.clear();
            if (init->is_string()) {
                p.initial.push_back(init->get<std::string>());
            } else if (init->is_array()) {
                for (const auto &label : *init) {
                    require(label.is_string(), "protocol.initial", "labels must be strings");
                    p.initial.push_back(label.get<std::string>());
                }
            } else {
                throw ConfigError("protocol.initial", "must be a label or an array of labels");
            }
        }
        require(p.initial.size() == 1 ||
                    p.initial.size() == static_cast<std::size_t>(c.lattice.site_count),
                "protocol.initial", "must hold one label or one per site");
        for (const auto &label : p.initial) site_label(label, "protocol.initial");

        if (const json *occ = r.find("occupancy")) {
            require(occ->is_array(), "protocol.occupancy", "must be an array of booleans");
            p.occupancy.clear();
            for (const auto &v : *occ) {
                require(v.is_boolean(), "protocol.occupancy", "must be an array of booleans");
                p.occupancy.push_back(v.get<bool>());
            }
            require(p.occupancy.empty() ||
                        p.occupancy.size() == static_cast<std::size_t>(c.lattice.site_count),
                    "protocol.occupancy", "must be empty or have one entry per site");
        }
        const std::int64_t trials = r.integer("trials", static_cast<std::int64_t>(p.trials));
        require(trials >= 1, "protocol.trials", "must be >= 1");
        p.trials = static_cast<std::size_t>(trials);

        const std::string target = r.string("pump_target", "a");
        require(target == "a" || target == "b", "protocol.pump_target", "must be one of: a, b");
        p.pump_target = target == "a" ? SiteLevel::a : SiteLevel::b;

        if (const json *steps = r.find("steps")) {
            require(steps->is_array(), "protocol.steps", "must be an array");
            for (std::size_t i = 0; i < steps->size(); ++i) {
                p.steps.push_back(read_step(Reader((*steps)[i], "protocol.steps." + std::to_string(i)),
                                            c.lattice));
            }
        }
        r.finish();
    }
    root.finish();

    if (register_scenario(c.scenario)) {
        require(c.lattice.site_count <= kMaxRegisterSites, "lattice.N",
                "register scenarios need N <= " + std::to_string(kMaxRegisterSites));
    }
    if (c.scenario == Scenario::cphase) {
        for (const std::int64_t s : c.lattice.sublattice()) {
            require(s + 1 < c.lattice.site_count, "lattice.k",
                    "every sublattice site needs a right neighbour inside the register");
        }
    }
    if (c.scenario == Scenario::protocol_script) {
        require(!c.protocol.steps.empty(), "protocol.steps", "must not be empty");
    }
    return c;
}

json to_json(const RunConfig &c) {
    json steps = json::array();
    for (const auto &s : c.protocol.steps) {
        steps.push_back({{"op", name_of(kOpNames, s.op)},
                         {"site", s.site ? json(*s.site) : json(nullptr)},
                         {"reach", s.reach ? json(*s.reach) : json(nullptr)},
                         {"angle", s.angle},
                         {"mode", s.mode ? json(mode_name(*s.mode)) : json(nullptr)},
                         {"pump_mode", pump_mode_name(s.pump_mode)}});
    }
    return {
        {"scenario", to_string(c.scenario)},
        {"seed", c.seed},
        {"output_path", c.output_path},
        {"output_format", c.output_format == OutputFormat::csv ? "csv" : "json"},
        {"neighbour_peak", c.neighbour_peak},
        {"delta_q", c.delta_q},
        {"gamma_q", c.gamma_q},
        {"lattice",
         {{"N", c.lattice.site_count},
          {"k", c.lattice.target_site},
          {"L", c.lattice.reach},
          {"eta", c.lattice.lamb_dicke}}},
        {"wave_b", wave_to_json(c.wave_b)},
        {"wave_q", wave_to_json(c.wave_q)},
        {"pulses",
         {{"t1", c.pulses.center_b},
          {"t2", c.pulses.center_q},
          {"delta_t", c.pulses.width},
          {"cutoff", c.pulses.cutoff_widths}}},
        {"integrator",
         {{"method", integrator_name(c.integrator.method)},
          {"rel_tol", c.integrator.rel_tol},
          {"abs_tol", c.integrator.abs_tol},
          {"max_step", c.integrator.max_step}}},
        {"scan",
         {{"omega_min", c.scan.omega_min},
          {"omega_max", c.scan.omega_max},
          {"points", c.scan.points},
          {"threshold_fidelity", c.scan.threshold_fidelity}}},
        {"beam",
         {{"rabi", c.beam.rabi},
          {"detuning", c.beam.detuning},
          {"decay", c.beam.decay},
          {"waist", c.beam.waist}}},
        {"budget",
         {{"theta", c.budget.tilt_angle ? json(*c.budget.tilt_angle) : json(nullptr)},
          {"wavelength", c.budget.wavelength},
          {"dtheta", c.budget.angle_error},
          {"dphi", c.budget.phase_error}}},
        {"protocol",
         {{"mode", mode_name(c.protocol.mode)},
          {"quench_method", method_name(c.protocol.quench_method)},
          {"axis", std::string(1, c.protocol.axis)},
          {"angle", c.protocol.angle},
          {"transfer_phase", c.protocol.transfer_phase},
          {"initial", c.protocol.initial},
          {"occupancy", c.protocol.occupancy},
          {"trials", c.protocol.trials},
          {"pump_target", level_name(c.protocol.pump_target)},
          {"steps", steps}}},
    };
}

void apply_override(json &document, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError(std::string(assignment), "override must have the form key=value");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    if (!document.is_object()) throw ConfigError("<root>", "must be an object");
    json *node = &document;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
        if (part.empty()) throw ConfigError(key, "empty path segment");
        json *next = nullptr;
        if (node->is_array()) {
            std::size_t index = 0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
            if (ec != std::errc{} || ptr != part.data() + part.size() || index >= node->size()) {
                throw ConfigError(key, "invalid array index '" + part + "'");
            }
            next = &(*node)[index];
        } else if (node->is_object()) {
            next = &(*node)[part];
        } else {
            throw ConfigError(key, "cannot descend into a non-object value");
        }
        if (dot == std::string::npos) {
            *next = std::move(value);
            return;
        }
        if (next->is_null()) *next = json::object();
        node = next;
        start = dot + 1;
    }
}

DriveSettings drive_settings(const RunConfig &c) {
    DriveSettings drive;
    drive.detuning = c.delta_q;
    drive.decay = c.gamma_q;
    drive.pulses = c.pulses;
    drive.integrator = c.integrator;
    return drive;
}

ProtocolSetup protocol_setup(const RunConfig &c) {
    ProtocolSetup setup;
    setup.lamb_dicke = c.lattice.lamb_dicke;
    setup.neighbour_peak = c.neighbour_peak;
    setup.drive = drive_settings(c);
    setup.method = c.protocol.quench_method;
    setup.beam = c.beam;
    setup.transfer_phase = c.protocol.transfer_phase;
    if (c.wave_b.customized() || c.wave_q.customized()) {
        setup.wave_b = resolve_wave(c.wave_b, c, "wave_b");
        setup.wave_q = resolve_wave(c.wave_q, c, "wave_q");
    }
    return setup;
}

QuenchSetup quench_setup(const RunConfig &c) {
    QuenchSetup setup = QuenchSetup::calibrated(c.lattice, c.neighbour_peak, drive_settings(c));
    setup.wave_b = resolve_wave(c.wave_b, c, "wave_b");
    setup.wave_q = resolve_wave(c.wave_q, c, "wave_q");
    setup.method = c.protocol.quench_method;
    return setup;
}

LatticeRegister initial_register(const RunConfig &c) {
    const auto n = static_cast<std::size_t>(c.lattice.site_count);
    std::vector<SiteVector> sites;
    sites.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const std::string &label = c.protocol.initial.size() == 1 ? c.protocol.initial[0]
                                                                  : c.protocol.initial.at(s);
        sites.push_back(site_label(label, "protocol.initial"));
    }
    return LatticeRegister::product(sites, c.protocol.occupancy);
}

std::string render_scenario(const RunConfig &c) {
    const auto &l = c.lattice;
    const auto &p = c.protocol;
    switch (c.scenario) {
    case Scenario::stirap_scan: return render_scan(c);
    case Scenario::precision_budget: return render_budget(c);
    case Scenario::pattern_load: return render_pattern(c);
    case Scenario::measure: return render_measure(c);
    case Scenario::protocol_script: return render_script(c);
    case Scenario::quench: {
        const AddressingProtocol protocol(protocol_setup(c));
        LatticeRegister reg = initial_register(c);
        const StepReport report = protocol.quench(reg, l.target_site, l.reach, p.mode);
        return render_register(c, reg, {{"report", step_report_to_json(report)}});
    }
    case Scenario::rotate: {
        const AddressingProtocol protocol(protocol_setup(c));
        LatticeRegister reg = initial_register(c);
        const StepReport report =
            p.axis == 'x' ? protocol.rotate_x(reg, l.target_site, l.reach, p.angle, p.mode)
                          : protocol.rotate_z(reg, l.target_site, l.reach, p.angle, p.mode);
        return render_register(c, reg, {{"report", step_report_to_json(report)}});
    }
    case Scenario::cphase: {
        const AddressingProtocol protocol(protocol_setup(c));
        LatticeRegister reg = initial_register(c);
        const StepReport report = protocol.collective_cphase(reg, l.target_site, l.reach, p.mode);
        return render_register(c, reg, {{"report", step_report_to_json(report)}});
    }
    }
    throw std::logic_error("unhandled scenario");
}

void write_atomically(const std::string &path, std::string_view contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path temp = target.string() + ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + temp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(temp, ignored);
            throw IoError("write to '" + temp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        throw IoError("cannot move output into '" + path + "': " + ec.message());
    }
}

void run_scenario(const RunConfig &config) {
    const std::string contents = render_scenario(config);
    if (config.output_path.empty()) {
        std::cout << contents << std::flush;
        if (!std::cout) throw IoError("write to stdout failed");
        return;
    }
    write_atomically(config.output_path, contents);
}

std::string format_number(double value) {
    char buf[64];
    const auto [end, ec] =
        std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, end);
}

std::string curve_to_csv(const FidelityCurve &curve) {
    std::string out = "omega_over_gamma,fidelity_initial,fidelity_target,leakage\n";
    for (const auto &s : curve.samples) {
        out += format_number(s.peak) + "," + format_number(s.fidelity_initial) + "," +
               format_number(s.fidelity_target) + "," + format_number(s.leakage) + "\n";
    }
    return out;
}

json curve_to_json(const FidelityCurve &curve) {
    json peaks = json::array(), fi = json::array(), ft = json::array(), leak = json::array();
    for (const auto &s : curve.samples) {
        peaks.push_back(s.peak);
        fi.push_back(s.fidelity_initial);
        ft.push_back(s.fidelity_target);
        leak.push_back(s.leakage);
    }
    return {{"omega_over_gamma", peaks},
            {"fidelity_initial", fi},
            {"fidelity_target", ft},
            {"leakage", leak}};
}

FidelityCurve curve_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) ||
        line != "omega_over_gamma,fidelity_initial,fidelity_target,leakage") {
        throw std::invalid_argument("curve CSV: missing or unexpected header");
    }
    FidelityCurve curve;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        double v[4];
        const char *p = line.data();
        const char *end = line.data() + line.size();
        for (int i = 0; i < 4; ++i) {
            const auto [next, ec] = std::from_chars(p, end, v[i]);
            const bool sep_ok = (i < 3) ? (next != end && *next == ',') : next == end;
            if (ec != std::errc{} || !sep_ok) {
                throw std::invalid_argument("curve CSV: malformed row " + std::to_string(row));
            }
            p = next + 1;
        }
        curve.samples.push_back({v[0], v[1], v[2], v[3]});
    }
    return curve;
}

void emit_curve(const FidelityCurve &curve, const std::string &path, OutputFormat format) {
    write_atomically(path, format == OutputFormat::csv ? curve_to_csv(curve)
                                                       : dump(curve_to_json(curve)));
}

json register_to_json(const LatticeRegister &reg, double threshold) {
    json amplitudes = json::array();
    const auto amps = reg.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (std::abs(amps[i]) <= threshold) continue;
        std::string levels;
        for (std::int64_t s = 0; s < reg.site_count(); ++s) {
            levels += "abq"[LatticeRegister::digit(i, s)];
        }
        amplitudes.push_back(
            {{"index", i}, {"levels", levels}, {"re", amps[i].real()}, {"im", amps[i].imag()}});
    }
    json populations = json::array();
    for (std::int64_t s = 0; s < reg.site_count(); ++s) {
        populations.push_back({reg.population(s, SiteLevel::a), reg.population(s, SiteLevel::b),
                               reg.population(s, SiteLevel::q)});
    }
    return {{"site_count", reg.site_count()},
            {"occupancy", reg.occupancy()},
            {"norm_squared", reg.norm_squared()},
            {"norm_deficit", reg.norm_deficit()},
            {"populations", populations},
            {"amplitudes", amplitudes}};
}

int describe_current_exception(std::string &error_json) {
    json e;
    int code = kExitRuntime;
    try {
        throw;
    } catch (const ConfigError &ex) {
        code = kExitConfig;
        e = {{"error", "config"}, {"key", ex.key()}, {"constraint", ex.constraint()}};
    } catch (const GeometryError &ex) {
        code = kExitConfig;
        e = {{"error", "geometry"}, {"message", ex.what()}};
    } catch (const json::exception &ex) {
        code = kExitConfig;
        e = {{"error", "config"}, {"message", ex.what()}};
    } catch (const IoError &ex) {
        code = kExitIo;
        e = {{"error", "io"}, {"message", ex.what()}};
    } catch (const IntegrationError &ex) {
        e = {{"error", "integration"}, {"message", ex.what()}};
    } catch (const std::exception &ex) {
        e = {{"error", "runtime"}, {"message", ex.what()}};
    } catch (...) {
        e = {{"error", "runtime"}, {"message", "unknown exception"}};
    }
    e["exit_code"] = code;
    error_json = e.dump();
    return code;
}

} // namespace lataddr
