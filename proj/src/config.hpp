#pragma once

// Structured JSON configuration: one LambdaSystem document with optional
// "simulation", "sweep", "grid" and "regime" blocks. Every error names the
// offending field.

#include "langevin_sim.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace eitnoise {

struct GridSpec {
    double min = -10.0;
    double max = 10.0;
    std::size_t n_points = 201;
    bool log = false;
};

/// "min:max:n" or "min:max:n:log".
GridSpec parse_grid(const std::string& text);
void validate_grid(const GridSpec& grid, const std::string& field);
std::vector<double> make_grid(const GridSpec& grid);

enum class SweepAxis { Drive, Delta, Temperature, Gamma21, Omega21 };

std::string axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Drive;
    GridSpec range;
    double delta = 0.0;  // probe detuning at which S is reported (non-delta axes)
};

struct RunConfig {
    LambdaSystem system;
    std::optional<SimulationConfig> simulation;
    std::optional<SweepSpec> sweep;
    std::optional<GridSpec> grid;
    RegimeOptions regime;
};

LambdaSystem parse_system(const nlohmann::json& doc);
SimulationConfig parse_simulation(const nlohmann::json& block);
SweepSpec parse_sweep(const nlohmann::json& block);
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);

nlohmann::json system_to_json(const LambdaSystem& system);
nlohmann::json simulation_to_json(const SimulationConfig& config);
nlohmann::json grid_to_json(const GridSpec& grid);

/// Copy of `system` with the swept parameter set to `value`.
LambdaSystem with_axis_value(const LambdaSystem& system, SweepAxis axis, double value);

}  // namespace eitnoise
