#include "config.hpp"

#include "error.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace eitnoise {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::Config, field + ": " + what);
}

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& prefix) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail(join(prefix, it.key()), "unknown field");
    }
}

const json& require_object(const json& v, const std::string& field) {
    if (!v.is_object()) fail(field, "expected an object");
    return v;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
}

double number(const json& obj, const std::string& key, const std::string& prefix) {
    if (!obj.contains(key)) fail(join(prefix, key), "required field missing");
    return as_number(obj.at(key), join(prefix, key));
}

double number_or(const json& obj, const std::string& key, const std::string& prefix,
                 double fallback) {
    return obj.contains(key) ? as_number(obj.at(key), join(prefix, key)) : fallback;
}

std::uint64_t unsigned_or(const json& obj, const std::string& key, const std::string& prefix,
                          std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                   v.get<std::int64_t>() < 0)) {
        fail(join(prefix, key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string string_or(const json& obj, const std::string& key, const std::string& prefix,
                      const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) fail(join(prefix, key), "expected a string");
    return obj.at(key).get<std::string>();
}

cplx parse_complex(const json& v, const std::string& field) {
    if (v.is_number()) return {as_number(v, field), 0.0};
    if (v.is_array()) {
        if (v.size() != 2) fail(field, "expected [re, im]");
        return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
    }
    if (v.is_object()) {
        reject_unknown(v, {"re", "im"}, field);
        return {number_or(v, "re", field, 0.0), number_or(v, "im", field, 0.0)};
    }
    fail(field, "expected a number, [re, im] or {\"re\", \"im\"}");
}

GridSpec parse_grid_object(const json& v, const std::string& field) {
    require_object(v, field);
    reject_unknown(v, {"min", "max", "n_points", "spacing"}, field);
    GridSpec g;
    g.min = number(v, "min", field);
    g.max = number(v, "max", field);
    g.n_points = unsigned_or(v, "n_points", field, g.n_points);
    const std::string spacing = string_or(v, "spacing", field, "linear");
    if (spacing != "linear" && spacing != "log") {
        fail(field + ".spacing", "expected \"linear\" or \"log\"");
    }
    g.log = spacing == "log";
    validate_grid(g, field);
    return g;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3 && parts.size() != 4) fail("--grid", "expected min:max:n[:log]");
    GridSpec g;
    try {
        std::size_t used = 0;
        g.min = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("min");
        g.max = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("max");
        const long long n = std::stoll(parts[2], &used);
        if (used != parts[2].size() || n < 0) throw std::invalid_argument("n");
        g.n_points = static_cast<std::size_t>(n);
    } catch (const std::logic_error&) {
        fail("--grid", "could not parse '" + text + "' as min:max:n[:log]");
    }
    if (parts.size() == 4) {
        if (parts[3] != "log" && parts[3] != "linear") fail("--grid", "spacing must be log or linear");
        g.log = parts[3] == "log";
    }
    validate_grid(g, "--grid");
    return g;
}

void validate_grid(const GridSpec& g, const std::string& field) {
    if (g.n_points < 1) fail(field + ".n_points", "must be >= 1");
    if (!std::isfinite(g.min) || !std::isfinite(g.max)) fail(field, "bounds must be finite");
    if (g.n_points > 1 && !(g.min < g.max)) fail(field, "requires min < max");
    if (g.log && !(g.min > 0.0)) fail(field, "log spacing requires min > 0");
}

std::vector<double> make_grid(const GridSpec& g) {
    validate_grid(g, "grid");
    std::vector<double> v(g.n_points);
    if (g.n_points == 1) {
        v[0] = g.min;
        return v;
    }
    const double n = double(g.n_points - 1);
    for (std::size_t i = 0; i < g.n_points; ++i) {
        const double t = double(i) / n;
        v[i] = g.log ? std::exp(std::log(g.min) + t * (std::log(g.max) - std::log(g.min)))
                     : g.min + t * (g.max - g.min);
    }
    v.back() = g.max;
    return v;
}

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Drive: return "drive";
        case SweepAxis::Delta: return "delta";
        case SweepAxis::Temperature: return "temperature";
        case SweepAxis::Gamma21: return "gamma21";
        case SweepAxis::Omega21: return "omega21";
    }
    return "";
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "drive" || name == "omega_d") return SweepAxis::Drive;
    if (name == "delta") return SweepAxis::Delta;
    if (name == "temperature" || name == "T") return SweepAxis::Temperature;
    if (name == "gamma21") return SweepAxis::Gamma21;
    if (name == "omega21") return SweepAxis::Omega21;
    fail("sweep.axis", "unknown axis '" + name + "' (drive, delta, temperature, gamma21, omega21)");
}

LambdaSystem parse_system(const json& doc) {
    require_object(doc, "config");
    LambdaSystem s;
    const std::string units = string_or(doc, "units", "", "dimensionless");
    if (units == "dimensionless") {
        s.units = Units::Dimensionless;
    } else if (units == "si") {
        s.units = Units::SI;
    } else {
        fail("units", "expected \"dimensionless\" or \"si\"");
    }
    s.frequency_unit = number_or(doc, "frequency_unit", "", 0.0);
    s.omega31 = number(doc, "omega31", "");
    s.omega21 = number(doc, "omega21", "");
    s.a21 = number(doc, "a21", "");
    s.a31 = number(doc, "a31", "");
    s.a32 = number(doc, "a32", "");
    if (doc.contains("gamma31")) s.gamma31 = number(doc, "gamma31", "");
    if (doc.contains("gamma21")) s.gamma21 = number(doc, "gamma21", "");
    if (doc.contains("gamma32")) s.gamma32 = number(doc, "gamma32", "");
    s.dipole_scale = number_or(doc, "dipole_scale", "", 1.0);
    if (doc.contains("drive_rabi")) s.drive_rabi = parse_complex(doc.at("drive_rabi"), "drive_rabi");

    if (!doc.contains("temperature")) fail("temperature", "required field missing");
    const json& t = require_object(doc.at("temperature"), "temperature");
    if (t.contains("kelvin") == t.contains("occupations")) {
        fail("temperature", "give exactly one of \"kelvin\" or \"occupations\"");
    }
    reject_unknown(t, {"kelvin", "occupations"}, "temperature");
    if (t.contains("kelvin")) {
        s.temperature = Kelvin{as_number(t.at("kelvin"), "temperature.kelvin")};
    } else {
        const json& o = require_object(t.at("occupations"), "temperature.occupations");
        reject_unknown(o, {"n21", "n31", "n32"}, "temperature.occupations");
        const std::string p = "temperature.occupations";
        s.temperature = Occupations{number(o, "n21", p), number(o, "n31", p), number(o, "n32", p)};
    }
    validate(s);
    return s;
}

SimulationConfig parse_simulation(const json& block) {
    const std::string p = "simulation";
    require_object(block, p);
    reject_unknown(block,
                   {"dt", "n_steps", "n_traj", "seed", "burn_in", "welch", "delta_p",
                    "integrator", "band_halfwidth", "workers"},
                   p);
    SimulationConfig c;
    c.dt = number_or(block, "dt", p, c.dt);
    c.n_steps = unsigned_or(block, "n_steps", p, c.n_steps);
    c.n_traj = unsigned_or(block, "n_traj", p, c.n_traj);
    c.seed = unsigned_or(block, "seed", p, c.seed);
    c.burn_in = number_or(block, "burn_in", p, c.burn_in);
    c.delta_p = number_or(block, "delta_p", p, c.delta_p);
    c.band_halfwidth = number_or(block, "band_halfwidth", p, c.band_halfwidth);
    c.workers = static_cast<unsigned>(unsigned_or(block, "workers", p, c.workers));
    c.integrator = integrator_from_name(string_or(block, "integrator", p, "exact"));
    if (block.contains("welch")) {
        const std::string wp = "simulation.welch";
        const json& w = require_object(block.at("welch"), wp);
        reject_unknown(w, {"segment_length", "overlap", "window"}, wp);
        c.welch.segment_length = unsigned_or(w, "segment_length", wp, 0);
        c.welch.overlap = number_or(w, "overlap", wp, c.welch.overlap);
        c.welch.window = window_from_name(string_or(w, "window", wp, "hann"));
    }
    if (!(c.dt > 0.0)) fail("simulation.dt", "must be > 0");
    if (c.n_traj < 2) fail("simulation.n_traj", "must be >= 2");
    if (!(c.burn_in >= 0.0 && c.burn_in < 1.0)) fail("simulation.burn_in", "must lie in [0, 1)");
    if (!(c.welch.overlap >= 0.0 && c.welch.overlap < 1.0)) {
        fail("simulation.welch.overlap", "must lie in [0, 1)");
    }
    return c;
}

SweepSpec parse_sweep(const json& block) {
    require_object(block, "sweep");
    reject_unknown(block, {"axis", "range", "delta"}, "sweep");
    SweepSpec s;
    if (!block.contains("axis")) fail("sweep.axis", "required field missing");
    s.axis = axis_from_name(string_or(block, "axis", "sweep", ""));
    if (!block.contains("range")) fail("sweep.range", "required field missing");
    s.range = parse_grid_object(block.at("range"), "sweep.range");
    s.delta = number_or(block, "delta", "sweep", 0.0);
    return s;
}

RunConfig parse_config(const json& doc) {
    require_object(doc, "config");
    reject_unknown(doc,
                   {"units", "frequency_unit", "omega31", "omega21", "a21", "a31", "a32",
                    "gamma31", "gamma21", "gamma32", "dipole_scale", "temperature", "drive_rabi",
                    "simulation", "sweep", "grid", "regime", "name", "description"},
                   "");
    RunConfig rc;
    rc.system = parse_system(doc);
    if (doc.contains("simulation")) rc.simulation = parse_simulation(doc.at("simulation"));
    if (doc.contains("sweep")) rc.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("grid")) rc.grid = parse_grid_object(doc.at("grid"), "grid");
    if (doc.contains("regime")) {
        const json& r = require_object(doc.at("regime"), "regime");
        reject_unknown(r, {"much_greater", "awi_factor"}, "regime");
        rc.regime.much_greater = number_or(r, "much_greater", "regime", rc.regime.much_greater);
        rc.regime.awi_factor = number_or(r, "awi_factor", "regime", rc.regime.awi_factor);
        if (!(rc.regime.much_greater > 1.0)) fail("regime.much_greater", "must be > 1");
        if (!(rc.regime.awi_factor >= 1.0)) fail("regime.awi_factor", "must be >= 1");
    }
    return rc;
}

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail("config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json system_to_json(const LambdaSystem& s) {
    json j;
    j["units"] = s.units == Units::SI ? "si" : "dimensionless";
    if (s.frequency_unit > 0.0) j["frequency_unit"] = s.frequency_unit;
    j["omega31"] = s.omega31;
    j["omega21"] = s.omega21;
    j["a21"] = s.a21;
    j["a31"] = s.a31;
    j["a32"] = s.a32;
    if (s.gamma31) j["gamma31"] = *s.gamma31;
    if (s.gamma21) j["gamma21"] = *s.gamma21;
    if (s.gamma32) j["gamma32"] = *s.gamma32;
    j["dipole_scale"] = s.dipole_scale;
    if (const auto* k = std::get_if<Kelvin>(&s.temperature)) {
        j["temperature"] = {{"kelvin", k->value}};
    } else {
        const auto& o = std::get<Occupations>(s.temperature);
        j["temperature"] = {{"occupations", {{"n21", o.n21}, {"n31", o.n31}, {"n32", o.n32}}}};
    }
    j["drive_rabi"] = {s.drive_rabi.real(), s.drive_rabi.imag()};
    return j;
}

json simulation_to_json(const SimulationConfig& c) {
    return {
        {"dt", c.dt},
        {"n_steps", c.n_steps},
        {"n_traj", c.n_traj},
        {"seed", c.seed},
        {"burn_in", c.burn_in},
        {"delta_p", c.delta_p},
        {"integrator", integrator_name(c.integrator)},
        {"band_halfwidth", c.band_halfwidth},
        {"welch",
         {{"segment_length", c.welch.segment_length},
          {"overlap", c.welch.overlap},
          {"window", window_name(c.welch.window)}}},
    };
}

json grid_to_json(const GridSpec& g) {
    return {{"min", g.min},
            {"max", g.max},
            {"n_points", g.n_points},
            {"spacing", g.log ? "log" : "linear"}};
}

LambdaSystem with_axis_value(const LambdaSystem& system, SweepAxis axis, double value) {
    LambdaSystem s = system;
    switch (axis) {
        case SweepAxis::Drive: {
            const double mag = std::abs(system.drive_rabi);
            s.drive_rabi = mag > 0.0 ? system.drive_rabi * (value / mag) : cplx(value, 0.0);
            break;
        }
        case SweepAxis::Delta: break;
        case SweepAxis::Temperature:
            if (!std::holds_alternative<Kelvin>(system.temperature)) {
                fail("sweep.axis", "temperature sweeps need temperature.kelvin");
            }
            s.temperature = Kelvin{value};
            break;
        case SweepAxis::Gamma21: s.gamma21 = value; break;
        case SweepAxis::Omega21: s.omega21 = value; break;
    }
    validate(s);
    return s;
}

}  // namespace eitnoise
