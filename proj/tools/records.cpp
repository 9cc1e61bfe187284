#include "records.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace eitn_cli {

json encode_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double decode_number(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw std::runtime_error("expected a number in result record, got " + v.dump());
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

double num(const json& j, const char* key) { return decode_number(j.at(key)); }

void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_field(fields[i]);
    }
    os << "\r\n";
}

eitn_regime_kind regime_kind_from_name(const std::string& name) {
    for (int k = EITN_REGIME_UNDRIVEN; k <= EITN_REGIME_AWI_RISK; ++k) {
        if (name == eitn_regime_name(static_cast<eitn_regime_kind>(k))) {
            return static_cast<eitn_regime_kind>(k);
        }
    }
    throw std::runtime_error("unknown regime '" + name + "'");
}

}  // namespace

json to_json(const eitn_steady& s) {
    return {{"rho11", encode_number(s.rho11)},
            {"rho22", encode_number(s.rho22)},
            {"rho33", encode_number(s.rho33)},
            {"sigma32", {encode_number(s.sigma32_re), encode_number(s.sigma32_im)}},
            {"n23", encode_number(s.n23)},
            {"n13", encode_number(s.n13)},
            {"stationarity_residual", encode_number(s.stationarity_residual)}};
}

eitn_steady steady_from_json(const json& j) {
    eitn_steady s{};
    s.rho11 = num(j, "rho11");
    s.rho22 = num(j, "rho22");
    s.rho33 = num(j, "rho33");
    s.sigma32_re = decode_number(j.at("sigma32").at(0));
    s.sigma32_im = decode_number(j.at("sigma32").at(1));
    s.n23 = num(j, "n23");
    s.n13 = num(j, "n13");
    s.stationarity_residual = num(j, "stationarity_residual");
    return s;
}

json to_json(const eitn_regime& r) {
    return {{"regime", eitn_regime_name(r.kind)},
            {"ratio_upper", encode_number(r.ratio_upper)},
            {"ratio_lower", encode_number(r.ratio_lower)},
            {"t31_over_t32", encode_number(r.t31_over_t32)},
            {"gain_possible", r.gain_possible != 0},
            {"awi_risk", r.awi_risk != 0},
            {"coherence_bound_ok", r.coherence_bound_ok != 0}};
}

eitn_regime regime_from_json(const json& j) {
    eitn_regime r{};
    r.kind = regime_kind_from_name(j.at("regime").get<std::string>());
    r.name = eitn_regime_name(r.kind);
    r.ratio_upper = num(j, "ratio_upper");
    r.ratio_lower = num(j, "ratio_lower");
    r.t31_over_t32 = num(j, "t31_over_t32");
    r.gain_possible = j.at("gain_possible").get<bool>();
    r.awi_risk = j.at("awi_risk").get<bool>();
    r.coherence_bound_ok = j.at("coherence_bound_ok").get<bool>();
    return r;
}

json to_json(const eitn_limits& l) {
    return {{"s_resonant", encode_number(l.s_resonant)},
            {"s_resonant_einstein", encode_number(l.s_resonant_einstein)},
            {"s_low_temperature", encode_number(l.s_low_temperature)},
            {"s_a21_zero", encode_number(l.s_a21_zero)},
            {"s_omega21_to_zero", encode_number(l.s_omega21_to_zero)},
            {"flags",
             {{"t21_dominant", l.t21_dominant != 0},
              {"r3_small", l.r3_small != 0},
              {"r3_below_r2", l.r3_below_r2 != 0},
              {"t31_matches_t32", l.t31_matches_t32 != 0},
              {"low_temperature", l.low_temperature != 0},
              {"a21_zero", l.a21_zero != 0}}}};
}

eitn_limits limits_from_json(const json& j) {
    eitn_limits l{};
    l.s_resonant = num(j, "s_resonant");
    l.s_resonant_einstein = num(j, "s_resonant_einstein");
    l.s_low_temperature = num(j, "s_low_temperature");
    l.s_a21_zero = num(j, "s_a21_zero");
    l.s_omega21_to_zero = num(j, "s_omega21_to_zero");
    const json& f = j.at("flags");
    l.t21_dominant = f.at("t21_dominant").get<bool>();
    l.r3_small = f.at("r3_small").get<bool>();
    l.r3_below_r2 = f.at("r3_below_r2").get<bool>();
    l.t31_matches_t32 = f.at("t31_matches_t32").get<bool>();
    l.low_temperature = f.at("low_temperature").get<bool>();
    l.a21_zero = f.at("a21_zero").get<bool>();
    return l;
}

json to_json(const eitn_spectrum_row& r) {
    return {{"delta", encode_number(r.delta)},
            {"S_analytic", encode_number(r.s_analytic)},
            {"S_assembled", encode_number(r.s_assembled)},
            {"chi_aH_imag", encode_number(r.chi_aH_imag)},
            {"commutator_residual", encode_number(r.commutator_residual)},
            {"ordering_residual", encode_number(r.ordering_residual)},
            {"fdt_violation", encode_number(r.fdt_violation)},
            {"log10_fdt_violation", encode_number(r.log10_fdt_violation)},
            {"gain", r.gain != 0},
            {"normally_ordered", encode_number(r.normally_ordered)},
            {"anti_normally_ordered", encode_number(r.anti_normally_ordered)},
            {"symmetrized", encode_number(r.symmetrized)},
            {"antisymmetric", encode_number(r.antisymmetric)}};
}

eitn_spectrum_row spectrum_row_from_json(const json& j) {
    eitn_spectrum_row r{};
    r.delta = num(j, "delta");
    r.s_analytic = num(j, "S_analytic");
    r.s_assembled = num(j, "S_assembled");
    r.chi_aH_imag = num(j, "chi_aH_imag");
    r.commutator_residual = num(j, "commutator_residual");
    r.ordering_residual = num(j, "ordering_residual");
    r.fdt_violation = num(j, "fdt_violation");
    r.log10_fdt_violation = num(j, "log10_fdt_violation");
    r.gain = j.at("gain").get<bool>();
    r.normally_ordered = num(j, "normally_ordered");
    r.anti_normally_ordered = num(j, "anti_normally_ordered");
    r.symmetrized = num(j, "symmetrized");
    r.antisymmetric = num(j, "antisymmetric");
    return r;
}

json to_json(const eitn_fdt_report& r) {
    return {{"max_s_deviation", encode_number(r.max_s_deviation)},
            {"max_s_relative", encode_number(r.max_s_relative)},
            {"max_commutator_residual", encode_number(r.max_commutator_residual)},
            {"max_ordering_residual", encode_number(r.max_ordering_residual)},
            {"min_fdt_violation", encode_number(r.min_fdt_violation)},
            {"max_fdt_violation", encode_number(r.max_fdt_violation)},
            {"gain_rows", r.gain_rows},
            {"passed", r.passed != 0}};
}

eitn_fdt_report fdt_report_from_json(const json& j) {
    eitn_fdt_report r{};
    r.max_s_deviation = num(j, "max_s_deviation");
    r.max_s_relative = num(j, "max_s_relative");
    r.max_commutator_residual = num(j, "max_commutator_residual");
    r.max_ordering_residual = num(j, "max_ordering_residual");
    r.min_fdt_violation = num(j, "min_fdt_violation");
    r.max_fdt_violation = num(j, "max_fdt_violation");
    r.gain_rows = j.at("gain_rows").get<std::size_t>();
    r.passed = j.at("passed").get<bool>();
    return r;
}

json to_json(const eitn_sim_row& r) {
    return {{"nu", encode_number(r.nu)},
            {"psd_mean", encode_number(r.psd_mean)},
            {"psd_stderr", encode_number(r.psd_stderr)},
            {"expected_psd", encode_number(r.expected)},
            {"analytic_symmetrized", encode_number(r.analytic)},
            {"relative_deviation", encode_number(r.relative_deviation)},
            {"z_score", encode_number(r.z_score)}};
}

eitn_sim_row sim_row_from_json(const json& j) {
    return {num(j, "nu"),
            num(j, "psd_mean"),
            num(j, "psd_stderr"),
            num(j, "expected_psd"),
            num(j, "analytic_symmetrized"),
            num(j, "relative_deviation"),
            num(j, "z_score")};
}

json to_json(const eitn_sim_summary& s) {
    return {{"max_relative_deviation", encode_number(s.max_relative_deviation)},
            {"max_raw_relative_deviation", encode_number(s.max_raw_relative_deviation)},
            {"band_power_expected", encode_number(s.band_power_expected)},
            {"band_power_z", encode_number(s.band_power_z)},
            {"fraction_within_3sigma", encode_number(s.fraction_within_3sigma)},
            {"band_bins", s.band_bins}};
}

eitn_sim_summary sim_summary_from_json(const json& j) {
    return {num(j, "max_relative_deviation"), num(j, "max_raw_relative_deviation"),
            num(j, "band_power_expected"),    num(j, "band_power_z"),
            num(j, "fraction_within_3sigma"), j.at("band_bins").get<std::size_t>()};
}

json to_json(const eitn_sim_info& s) {
    return {{"n_bins", s.n_bins},
            {"burn_in_steps", s.burn_in_steps},
            {"segment_length", s.segment_length},
            {"segments_per_trajectory", s.segments_per_trajectory},
            {"band_power_mean", encode_number(s.band_power_mean)},
            {"band_power_stderr", encode_number(s.band_power_stderr)},
            {"system_hash", s.system_hash}};
}

eitn_sim_info sim_info_from_json(const json& j) {
    return {j.at("n_bins").get<std::size_t>(),
            j.at("burn_in_steps").get<std::size_t>(),
            j.at("segment_length").get<std::size_t>(),
            j.at("segments_per_trajectory").get<std::size_t>(),
            num(j, "band_power_mean"),
            num(j, "band_power_stderr"),
            j.at("system_hash").get<std::uint64_t>()};
}

json to_json(const SweepPoint& p) {
    return {{"value", encode_number(p.value)},
            {"regime", eitn_regime_name(p.regime)},
            {"steady", to_json(p.steady)},
            {"spectrum", to_json(p.row)}};
}

SweepPoint sweep_point_from_json(const json& j) {
    SweepPoint p;
    p.value = num(j, "value");
    p.regime = regime_kind_from_name(j.at("regime").get<std::string>());
    p.steady = steady_from_json(j.at("steady"));
    p.row = spectrum_row_from_json(j.at("spectrum"));
    return p;
}

json to_json(const SpectrumRecord& r) {
    json rows = json::array();
    for (const auto& x : r.rows) rows.push_back(to_json(x));
    return {{"rows", rows},
            {"report", to_json(r.report)},
            {"limits", to_json(r.limits)},
            {"regime", to_json(r.regime)}};
}

SpectrumRecord spectrum_record_from_json(const json& j) {
    SpectrumRecord r;
    for (const auto& x : j.at("rows")) r.rows.push_back(spectrum_row_from_json(x));
    r.report = fdt_report_from_json(j.at("report"));
    r.limits = limits_from_json(j.at("limits"));
    r.regime = regime_from_json(j.at("regime"));
    return r;
}

json to_json(const SweepRecord& r) {
    json points = json::array();
    for (const auto& p : r.points) points.push_back(to_json(p));
    return {{"axis", r.axis}, {"delta", encode_number(r.delta)}, {"points", points}};
}

SweepRecord sweep_record_from_json(const json& j) {
    SweepRecord r;
    r.axis = j.at("axis").get<std::string>();
    r.delta = num(j, "delta");
    for (const auto& p : j.at("points")) r.points.push_back(sweep_point_from_json(p));
    return r;
}

json to_json(const SimulationRecord& r) {
    json rows = json::array();
    for (const auto& x : r.rows) rows.push_back(to_json(x));
    return {{"info", to_json(r.info)}, {"summary", to_json(r.summary)}, {"rows", rows}};
}

SimulationRecord simulation_record_from_json(const json& j) {
    SimulationRecord r;
    r.info = sim_info_from_json(j.at("info"));
    r.summary = sim_summary_from_json(j.at("summary"));
    for (const auto& x : j.at("rows")) r.rows.push_back(sim_row_from_json(x));
    return r;
}

void write_spectrum_csv(std::ostream& os, const std::vector<eitn_spectrum_row>& rows) {
    csv_row(os, {"delta", "S_analytic", "S_assembled", "chi_aH_imag", "commutator_residual",
                 "fdt_violation", "log10_fdt_violation", "gain"});
    for (const auto& r : rows) {
        csv_row(os, {format_number(r.delta), format_number(r.s_analytic),
                     format_number(r.s_assembled), format_number(r.chi_aH_imag),
                     format_number(r.commutator_residual), format_number(r.fdt_violation),
                     format_number(r.log10_fdt_violation), r.gain ? "1" : "0"});
    }
}

void write_sweep_csv(std::ostream& os, const SweepRecord& r) {
    csv_row(os, {r.axis, "S_analytic", "S_assembled", "fdt_violation", "log10_fdt_violation",
                 "gain", "regime", "rho11", "rho22", "rho33"});
    for (const auto& p : r.points) {
        csv_row(os, {format_number(p.value), format_number(p.row.s_analytic),
                     format_number(p.row.s_assembled), format_number(p.row.fdt_violation),
                     format_number(p.row.log10_fdt_violation), p.row.gain ? "1" : "0",
                     eitn_regime_name(p.regime), format_number(p.steady.rho11),
                     format_number(p.steady.rho22), format_number(p.steady.rho33)});
    }
}

void write_simulation_csv(std::ostream& os, const std::vector<eitn_sim_row>& rows) {
    csv_row(os, {"nu", "psd_mean", "psd_stderr", "expected_psd", "analytic_symmetrized",
                 "relative_deviation", "z_score"});
    for (const auto& r : rows) {
        csv_row(os, {format_number(r.nu), format_number(r.psd_mean), format_number(r.psd_stderr),
                     format_number(r.expected), format_number(r.analytic),
                     format_number(r.relative_deviation), format_number(r.z_score)});
    }
}

void write_steady_csv(std::ostream& os, const eitn_steady& s, const eitn_regime& r) {
    csv_row(os, {"rho11", "rho22", "rho33", "sigma32_re", "sigma32_im", "n23", "n13",
                 "stationarity_residual", "regime", "ratio_upper", "ratio_lower",
                 "t31_over_t32", "gain_possible", "awi_risk", "coherence_bound_ok"});
    csv_row(os, {format_number(s.rho11), format_number(s.rho22), format_number(s.rho33),
                 format_number(s.sigma32_re), format_number(s.sigma32_im), format_number(s.n23),
                 format_number(s.n13), format_number(s.stationarity_residual),
                 eitn_regime_name(r.kind), format_number(r.ratio_upper),
                 format_number(r.ratio_lower), format_number(r.t31_over_t32),
                 r.gain_possible ? "1" : "0", r.awi_risk ? "1" : "0",
                 r.coherence_bound_ok ? "1" : "0"});
}

void write_diffusion_csv(std::ostream& os, const std::vector<DiffusionEntry>& entries) {
    csv_row(os, {"f_a", "f_b", "general_re", "general_im", "offdiagonal_re", "offdiagonal_im",
                 "shift_probe", "shift_drive"});
    for (const auto& e : entries) {
        csv_row(os, {e.a, e.b, format_number(e.general_re), format_number(e.general_im),
                     format_number(e.offdiag_re), format_number(e.offdiag_im),
                     std::to_string(e.shift_probe), std::to_string(e.shift_drive)});
    }
}

}  // namespace eitn_cli
