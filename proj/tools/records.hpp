#pragma once

// Result records written by the command-line tool: JSON (de)serialization and
// RFC 4180 CSV tables. Non-finite numbers are stored as the strings "nan",
// "inf" and "-inf" so that records survive a JSON round trip.

#include "eitnoise/eitnoise.h"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace eitn_cli {

using json = nlohmann::json;

json encode_number(double v);
double decode_number(const json& v);
std::string format_number(double v);
std::string csv_field(const std::string& s);

json to_json(const eitn_steady& s);
eitn_steady steady_from_json(const json& j);

json to_json(const eitn_regime& r);
eitn_regime regime_from_json(const json& j);

json to_json(const eitn_limits& l);
eitn_limits limits_from_json(const json& j);

json to_json(const eitn_spectrum_row& r);
eitn_spectrum_row spectrum_row_from_json(const json& j);

json to_json(const eitn_fdt_report& r);
eitn_fdt_report fdt_report_from_json(const json& j);

json to_json(const eitn_sim_row& r);
eitn_sim_row sim_row_from_json(const json& j);

json to_json(const eitn_sim_summary& s);
eitn_sim_summary sim_summary_from_json(const json& j);

json to_json(const eitn_sim_info& s);
eitn_sim_info sim_info_from_json(const json& j);

struct SweepPoint {
    double value = 0.0;
    eitn_spectrum_row row{};
    eitn_steady steady{};
    eitn_regime_kind regime = EITN_REGIME_UNDRIVEN;
};

json to_json(const SweepPoint& p);
SweepPoint sweep_point_from_json(const json& j);

struct SpectrumRecord {
    std::vector<eitn_spectrum_row> rows;
    eitn_fdt_report report{};
    eitn_limits limits{};
    eitn_regime regime{};
};

json to_json(const SpectrumRecord& r);
SpectrumRecord spectrum_record_from_json(const json& j);

struct SweepRecord {
    std::string axis;
    double delta = 0.0;
    std::vector<SweepPoint> points;
};

json to_json(const SweepRecord& r);
SweepRecord sweep_record_from_json(const json& j);

struct SimulationRecord {
    eitn_sim_info info{};
    eitn_sim_summary summary{};
    std::vector<eitn_sim_row> rows;
};

json to_json(const SimulationRecord& r);
SimulationRecord simulation_record_from_json(const json& j);

// Fixed column orders.
void write_spectrum_csv(std::ostream& os, const std::vector<eitn_spectrum_row>& rows);
void write_sweep_csv(std::ostream& os, const SweepRecord& r);
void write_simulation_csv(std::ostream& os, const std::vector<eitn_sim_row>& rows);
void write_steady_csv(std::ostream& os, const eitn_steady& s, const eitn_regime& r);

struct DiffusionEntry {
    std::string a, b;
    double general_re = 0.0, general_im = 0.0;
    double offdiag_re = 0.0, offdiag_im = 0.0;
    int shift_probe = 0, shift_drive = 0;
};
void write_diffusion_csv(std::ostream& os, const std::vector<DiffusionEntry>& entries);

}  // namespace eitn_cli
