#pragma once

#include "core_model.hpp"

#include <array>
#include <cstdint>
#include <string_view>

namespace eitnoise {

struct SteadyState {
    double rho11 = 1.0;
    double rho22 = 0.0;
    double rho33 = 0.0;
    cplx sigma32{0.0, 0.0};  // drive coherence in the rotating frame
    double n23 = 0.0;        // rho22 - rho33
    double n13 = 1.0;        // rho11 - rho33

    double population(int level) const {
        return level == L1 ? rho11 : (level == L2 ? rho22 : rho33);
    }
};

/// Identity of a (system, relaxation, steady state) triple; derived objects
/// carry it so that mismatched inputs can be detected.
std::uint64_t medium_fingerprint(const LambdaSystem& system, const RelaxationModel& model,
                                 const SteadyState& state);

/// Drive-induced 2 <-> 3 transfer rate 2|Omega_d|^2 / gamma32 (resonant drive).
double drive_transfer_rate(const LambdaSystem& system, const RelaxationModel& model);

/// Generator G of the population rate equations, d rho/dt = G rho, including
/// the drive-induced transfer. Columns sum to zero.
Eigen::Matrix3d rate_matrix(const LambdaSystem& system, const RelaxationModel& model);

/// Stationary populations as the normalized null vector of the rate matrix,
/// evaluated through its principal cofactors (sums of products of positive
/// rates, so tiny populations keep full relative accuracy), and the drive
/// coherence sigma32 = i Omega_d n23 / gamma32.
SteadyState steady_populations(const RelaxationModel& model, const LambdaSystem& system);

/// Largest relative residual of the population and sigma32 equations.
double stationarity_residual(const LambdaSystem& system, const RelaxationModel& model,
                             const SteadyState& state);

enum class PopulationFormula { RepeatedT31, Corrected };

/// Closed-form rho22/rho11 and rho33/rho11 in terms of T_ij and r_j^T. The
/// RepeatedT31 variant uses 1/(T21 T31) twice; the corrected one replaces the
/// second instance by 1/(T21 T32). Needs a single temperature (detailed balance).
std::array<double, 2> closed_form_population_ratios(const LambdaSystem& system,
                                                     const RelaxationModel& model,
                                                     PopulationFormula formula);

enum class Regime { Undriven, ClearEit, Marginal, Saturated, AwiRisk };

std::string_view regime_name(Regime regime);

struct RegimeOptions {
    double much_greater = 100.0;  // ratio required by each ">>" of the EIT window
    double awi_factor = 2.0;      // allowed T31/T32 deviation before AWI is suspected
};

struct RegimeReport {
    Regime regime = Regime::Undriven;
    double ratio_upper = 0.0;  // gamma31^2 / |Omega_d|^2
    double ratio_lower = 0.0;  // |Omega_d|^2 / (gamma21 gamma31)
    double t31_over_t32 = 1.0;
    bool gain_possible = false;  // absorption numerator negative for some detuning
    bool awi_risk = false;
    bool coherence_bound_ok = true;  // |sigma32|^2 <= rho22 rho33
};

RegimeReport eit_regime_check(const LambdaSystem& system, const RelaxationModel& model,
                              const SteadyState& state, const RegimeOptions& options = {});

}  // namespace eitnoise
