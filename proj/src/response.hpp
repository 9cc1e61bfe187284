#pragma once

// Linear response of the driven medium near the probe frequency: transfer of
// the Langevin forces into sigma31, the anti-Hermitian susceptibility and the
// noise factor S that takes the place of n_T in the fluctuation-dissipation
// relation.

#include "steady_state.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eitnoise {

struct ResponseKernel {
    std::vector<double> nu_grid;
    double delta_p = 0.0;
    std::vector<cplx> h31;     // coefficient of f31 in sigma31^f
    std::vector<cplx> h21;     // coefficient of f21 in sigma31^f
    std::vector<cplx> chi_aH;  // at Delta = delta_p + nu
    double dipole_scale = 1.0;
    std::uint64_t provenance = 0;
};

/// |Omega_d|^2 + (gamma21 - i delta)(gamma31 - i delta).
cplx response_denominator(const LambdaSystem& system, const RelaxationModel& model, double delta);

/// Throws Error(UndampedResonance) if the denominator vanishes on the grid.
ResponseKernel transfer_functions(const LambdaSystem& system, const RelaxationModel& model,
                                  const SteadyState& state, double delta_p,
                                  std::span<const double> nu_grid);

// The two real polynomials shared by chi^aH and S at detuning Delta, and the
// positive denominator (|Omega|^2 + g21 g31 - D^2)^2 + D^2 (g21 + g31)^2.
struct AbsorptionTerms {
    double absorption = 0.0;  // n13(...) - (|W|^2 n23 / g32)(...)
    double emission = 0.0;    // rho33(...) + (|W|^2 n23 / g32)(...)
    double denominator = 0.0;
};

AbsorptionTerms absorption_terms(const LambdaSystem& system, const RelaxationModel& model,
                                 const SteadyState& state, double delta);

/// Anti-Hermitian susceptibility; purely imaginary, in units of dipole_scale.
cplx susceptibility_aH(const LambdaSystem& system, const RelaxationModel& model,
                       const SteadyState& state, double delta);

/// Noise factor S(Delta). Throws Error(GainMedium) where the medium amplifies.
double noise_factor_S(const LambdaSystem& system, const RelaxationModel& model,
                      const SteadyState& state, double delta);

/// As noise_factor_S but returns nullopt in the gain regime.
std::optional<double> try_noise_factor_S(const LambdaSystem& system,
                                         const RelaxationModel& model, const SteadyState& state,
                                         double delta);

struct LimitOptions {
    double much_greater = 100.0;
    double match_tolerance = 0.1;  // |T31/T32 - 1| allowed for "T31 ~ T32"
};

struct LimitingS {
    // Resonant strong-drive form in relaxation times and Boltzmann factors,
    // and the same form in Einstein coefficients.
    double s_resonant = 0.0;
    double s_resonant_einstein = 0.0;
    double s_low_temperature = 0.0;  // 2 n_T(omega21)
    double s_a21_zero = 0.0;         // exp(-hbar omega21 / T)
    double s_omega21_to_zero = 1.0;

    bool t21_dominant = false;     // T21 >> T31, T32
    bool r3_small = false;         // r3 << 1
    bool r3_below_r2 = false;      // r3 << r2
    bool t31_matches_t32 = false;  // T31 ~ T32
    bool low_temperature = false;  // n_T(omega31) << 1
    bool a21_zero = false;
};

LimitingS limiting_S(const LambdaSystem& system, const LimitOptions& options = {});

/// Einstein-coefficient resonant form evaluated after moving the splitting to
/// omega21_new with A21 scaled as omega21^3 (Kelvin temperature required).
double resonant_S_radiative_scaling(const LambdaSystem& system, double omega21_new);

}  // namespace eitnoise
