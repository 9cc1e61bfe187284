#include "response.hpp"

#include "error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace eitnoise {

cplx response_denominator(const LambdaSystem& system, const RelaxationModel& model,
                          double delta) {
    const cplx a(model.gamma21(), -delta);
    const cplx b(model.gamma31(), -delta);
    return std::norm(system.drive_rabi) + a * b;
}

ResponseKernel transfer_functions(const LambdaSystem& system, const RelaxationModel& model,
                                  const SteadyState& state, double delta_p,
                                  std::span<const double> nu_grid) {
    ResponseKernel k;
    k.nu_grid.assign(nu_grid.begin(), nu_grid.end());
    k.delta_p = delta_p;
    k.dipole_scale = system.dipole_scale;
    k.provenance = medium_fingerprint(system, model, state);
    k.h31.reserve(nu_grid.size());
    k.h21.reserve(nu_grid.size());
    k.chi_aH.reserve(nu_grid.size());

    const cplx i1(0.0, 1.0);
    for (double nu : nu_grid) {
        const double delta = delta_p + nu;
        const cplx den = response_denominator(system, model, delta);
        if (den == cplx{}) {
            throw Error(ErrorCode::UndampedResonance,
                        "undamped resonance at nu = " + std::to_string(nu));
        }
        k.h31.push_back(cplx(model.gamma21(), -delta) / den);
        k.h21.push_back(i1 * system.drive_rabi / den);
        k.chi_aH.push_back(susceptibility_aH(system, model, state, delta));
    }
    return k;
}

AbsorptionTerms absorption_terms(const LambdaSystem& system, const RelaxationModel& model,
                                 const SteadyState& state, double delta) {
    const double w2 = std::norm(system.drive_rabi);
    const double g21 = model.gamma21();
    const double g31 = model.gamma31();
    const double d2 = delta * delta;

    const double probe_part = g21 * w2 + g31 * (g21 * g21 + d2);
    const double drive_part = w2 * state.n23 / model.gamma32() * (w2 + g21 * g31 - d2);
    const double re = w2 + g21 * g31 - d2;
    const double im = delta * (g21 + g31);

    AbsorptionTerms t;
    t.absorption = state.n13 * probe_part - drive_part;
    t.emission = state.rho33 * probe_part + drive_part;
    t.denominator = re * re + im * im;
    return t;
}

cplx susceptibility_aH(const LambdaSystem& system, const RelaxationModel& model,
                       const SteadyState& state, double delta) {
    const AbsorptionTerms t = absorption_terms(system, model, state, delta);
    return cplx(0.0, system.dipole_scale * t.absorption / t.denominator);
}

std::optional<double> try_noise_factor_S(const LambdaSystem& system,
                                         const RelaxationModel& model, const SteadyState& state,
                                         double delta) {
    const AbsorptionTerms t = absorption_terms(system, model, state, delta);
    if (!(t.absorption > 0.0)) return std::nullopt;
    return t.emission / t.absorption;
}

double noise_factor_S(const LambdaSystem& system, const RelaxationModel& model,
                      const SteadyState& state, double delta) {
    if (auto s = try_noise_factor_S(system, model, state, delta)) return *s;
    throw Error(ErrorCode::GainMedium,
                "gain medium (AWI regime): S undefined as photon number at Delta = " +
                    std::to_string(delta));
}

LimitingS limiting_S(const LambdaSystem& system, const LimitOptions& options) {
    const ThermalState th = thermal_state(system);
    const RelaxationTimes t = relaxation_times(system);
    const double r2 = std::exp(-th.x21);
    const double r3 = std::exp(-th.x31);
    const double r32 = std::exp(-th.x32);

    LimitingS out;
    const double t21_over_t31 = t.t21 / t.t31;
    if (std::isinf(t21_over_t31)) {
        out.s_resonant = r3 > 0.0 ? r2 : 2.0 * r2 / (1.0 - r2);
    } else {
        out.s_resonant = (2.0 * r2 + t21_over_t31 * r3) / (1.0 - r2 + t21_over_t31 * r32);
    }
    out.s_resonant_einstein = (2.0 * system.a21 * th.n21 + system.a31 * th.n31) /
                              (system.a21 + system.a31 * th.n32);
    out.s_low_temperature = 2.0 * th.n21;
    out.s_a21_zero = r2;
    out.s_omega21_to_zero = 1.0;

    const double big = options.much_greater;
    out.t21_dominant = t.t21 >= big * t.t31 && t.t21 >= big * t.t32;
    out.r3_small = r3 * big <= 1.0;
    out.r3_below_r2 = r3 * big <= r2;
    out.t31_matches_t32 = std::abs(t.t31 / t.t32 - 1.0) <= options.match_tolerance;
    out.low_temperature = th.n31 * big <= 1.0;
    out.a21_zero = system.a21 == 0.0;
    return out;
}

double resonant_S_radiative_scaling(const LambdaSystem& system, double omega21_new) {
    if (!std::holds_alternative<Kelvin>(system.temperature)) {
        throw Error(ErrorCode::InvalidArgument,
                    "radiative omega21 scaling needs a kelvin temperature");
    }
    if (!(omega21_new > 0.0) || !(omega21_new < system.omega31)) {
        throw Error(ErrorCode::InvalidArgument, "omega21_new must lie in (0, omega31)");
    }
    LambdaSystem moved = system;
    const double ratio = omega21_new / system.omega21;
    moved.omega21 = omega21_new;
    moved.a21 = system.a21 * ratio * ratio * ratio;
    return limiting_S(moved).s_resonant_einstein;
}

}  // namespace eitnoise
