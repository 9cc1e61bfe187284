#include "steady_state.hpp"

#include "error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

namespace eitnoise {

std::uint64_t medium_fingerprint(const LambdaSystem& system, const RelaxationModel& model,
                                 const SteadyState& state) {
    // FNV-1a over the numbers that determine the linear noise model.
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof v);
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 1099511628211ULL;
        }
    };
    for (int i = 0; i < 9; ++i) mix(model.w.data()[i]);
    for (int i = 0; i < 9; ++i) mix(model.gamma.data()[i]);
    mix(system.drive_rabi.real());
    mix(system.drive_rabi.imag());
    mix(system.dipole_scale);
    mix(state.rho11);
    mix(state.rho22);
    mix(state.rho33);
    mix(state.sigma32.real());
    mix(state.sigma32.imag());
    return h;
}

double drive_transfer_rate(const LambdaSystem& system, const RelaxationModel& model) {
    return 2.0 * std::norm(system.drive_rabi) / model.gamma32();
}

Eigen::Matrix3d rate_matrix(const LambdaSystem& system, const RelaxationModel& model) {
    Eigen::Matrix3d g = model.w;
    const double k = drive_transfer_rate(system, model);
    g(L2, L2) -= k;
    g(L3, L3) -= k;
    g(L2, L3) += k;
    g(L3, L2) += k;
    return g;
}

SteadyState steady_populations(const RelaxationModel& model, const LambdaSystem& system) {
    const Eigen::Matrix3d g = rate_matrix(system, model);
    // a(i, j): transfer rate j -> i. Each principal cofactor of the generator is
    // the sum over spanning trees directed into that level.
    auto a = [&](int i, int j) { return g(i, j); };
    // Products of two small rates can leave the double range while their
    // ratios do not, so the cofactors are summed in log space.
    auto log_tree = [&](std::array<double, 6> r) {
        double terms[3];
        for (int t = 0; t < 3; ++t) terms[t] = std::log(r[2 * t]) + std::log(r[2 * t + 1]);
        const double top = std::max({terms[0], terms[1], terms[2]});
        if (!std::isfinite(top)) return top;
        double sum = 0.0;
        for (double v : terms) sum += std::exp(v - top);
        return top + std::log(sum);
    };
    const std::array<double, 3> lp = {
        log_tree({a(L1, L2), a(L1, L3), a(L1, L2), a(L2, L3), a(L1, L3), a(L3, L2)}),
        log_tree({a(L2, L1), a(L2, L3), a(L2, L1), a(L1, L3), a(L2, L3), a(L3, L1)}),
        log_tree({a(L3, L1), a(L3, L2), a(L3, L1), a(L1, L2), a(L3, L2), a(L2, L1)}),
    };
    const double top = std::max({lp[0], lp[1], lp[2]});
    if (!std::isfinite(top)) {
        throw Error(ErrorCode::NoSteadyState,
                    "no unique steady state: the rate matrix has a degenerate null space");
    }
    double p1 = a(L1, L2) * a(L1, L3) + a(L1, L2) * a(L2, L3) + a(L1, L3) * a(L3, L2);
    double p2 = a(L2, L1) * a(L2, L3) + a(L2, L1) * a(L1, L3) + a(L2, L3) * a(L3, L1);
    double p3 = a(L3, L1) * a(L3, L2) + a(L3, L1) * a(L1, L2) + a(L3, L2) * a(L2, L1);
    double z = p1 + p2 + p3;
    double z_raw = z;
    const double smallest = std::min({lp[0], lp[1], lp[2]});
    if (!std::isfinite(z) || smallest - top < -600.0 || top < -600.0 || top > 600.0) {
        p1 = std::exp(lp[0] - top);
        p2 = std::exp(lp[1] - top);
        p3 = std::exp(lp[2] - top);
        z = p1 + p2 + p3;
        z_raw = std::exp(top) * z;
    }

    SteadyState s;
    s.rho11 = p1 / z;
    s.rho22 = p2 / z;
    s.rho33 = p3 / z;
    // The drive rate cancels from p2 - p3; use the relaxation-only rates so
    // n23 does not lose digits when the drive saturates the 2-3 transition.
    const auto& w = model.w;
    const double p23 = (a(L2, L1) + a(L3, L1)) * (w(L2, L3) - w(L3, L2)) +
                       a(L2, L1) * a(L1, L3) - a(L3, L1) * a(L1, L2);
    s.n23 = z_raw > 1e-200 && std::isfinite(p23) ? p23 / z_raw : s.rho22 - s.rho33;
    s.n13 = s.rho11 - s.rho33;
    s.sigma32 = cplx(0.0, 1.0) * system.drive_rabi * s.n23 / model.gamma32();
    return s;
}

double stationarity_residual(const LambdaSystem& system, const RelaxationModel& model,
                             const SteadyState& state) {
    const Eigen::Matrix3d g = rate_matrix(system, model);
    const Eigen::Vector3d rho(state.rho11, state.rho22, state.rho33);
    // Flows are measured against the largest gross flux so that a level whose
    // population underflows does not register as a unit residual.
    Eigen::Vector3d flow = Eigen::Vector3d::Zero();
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
            flow(j) += g(j, k) * rho(k);
            scale = std::max(scale, std::abs(g(j, k) * rho(k)));
        }
    }
    double worst = scale > 0.0 ? flow.cwiseAbs().maxCoeff() / scale : 0.0;
    const cplx i1(0.0, 1.0);
    const cplx coh_rhs = -model.gamma32() * state.sigma32 + i1 * system.drive_rabi * state.n23;
    const double coh_scale =
        model.gamma32() * std::abs(state.sigma32) + std::abs(system.drive_rabi * state.n23);
    if (coh_scale > 0.0) worst = std::max(worst, std::abs(coh_rhs) / coh_scale);

    const double norm = state.rho11 + state.rho22 + state.rho33;
    return std::max(worst, std::abs(norm - 1.0));
}

std::array<double, 2> closed_form_population_ratios(const LambdaSystem& system,
                                                     const RelaxationModel& model,
                                                     PopulationFormula formula) {
    const ThermalState th = thermal_state(system);
    const RelaxationTimes t = relaxation_times(system);
    const double r2 = std::exp(-th.x21);
    const double r3 = std::exp(-th.x31);
    const double r32 = std::exp(-th.x32);  // r3/r2 without the 0/0 at T = 0
    const double k = drive_transfer_rate(system, model);
    const double i21 = 1.0 / t.t21;
    const double i31 = 1.0 / t.t31;
    const double i32 = 1.0 / t.t32;

    const double bracket = formula == PopulationFormula::RepeatedT31
                               ? i21 * i31 + i21 * i31 + i31 * i32 * r32
                               : i21 * i31 + i21 * i32 + i31 * i32 * r32;
    const double pump = k * (r2 * i21 + r3 * i31);
    const double den = bracket + k * (i21 + i31);
    return {(r2 * bracket + pump) / den, (r3 * bracket + pump) / den};
}

std::string_view regime_name(Regime regime) {
    switch (regime) {
        case Regime::Undriven: return "undriven";
        case Regime::ClearEit: return "clear_EIT";
        case Regime::Marginal: return "marginal";
        case Regime::Saturated: return "saturated";
        case Regime::AwiRisk: return "AWI_risk";
    }
    return "unknown";
}

RegimeReport eit_regime_check(const LambdaSystem& system, const RelaxationModel& model,
                              const SteadyState& state, const RegimeOptions& options) {
    RegimeReport r;
    const double w2 = std::norm(system.drive_rabi);
    const double g31 = model.gamma31();
    const double g21 = model.gamma21();
    const double g32 = model.gamma32();
    r.ratio_upper = w2 > 0.0 ? g31 * g31 / w2 : std::numeric_limits<double>::infinity();
    r.ratio_lower = g21 > 0.0 ? w2 / (g21 * g31) : std::numeric_limits<double>::infinity();

    const RelaxationTimes t = relaxation_times(system);
    r.t31_over_t32 = t.t31 / t.t32;

    // Absorption numerator as c0 + c1 Delta^2; gain appears where it is negative.
    const double pump = w2 * state.n23 / g32;
    const double c0 = state.n13 * (g21 * w2 + g31 * g21 * g21) - pump * (w2 + g21 * g31);
    const double c1 = state.n13 * g31 + pump;
    r.gain_possible = c0 < 0.0 || c1 < 0.0;

    const double f = options.awi_factor;
    const bool t_matched =
        std::isfinite(r.t31_over_t32) && r.t31_over_t32 <= f && r.t31_over_t32 >= 1.0 / f;
    r.awi_risk = !t_matched && r.gain_possible;

    r.coherence_bound_ok =
        std::norm(state.sigma32) <= state.rho22 * state.rho33 * (1.0 + 1e-9) + 1e-300;

    const double need = options.much_greater * (1.0 - 1e-12);
    if (r.awi_risk) {
        r.regime = Regime::AwiRisk;
    } else if (w2 == 0.0) {
        r.regime = Regime::Undriven;
    } else if (r.ratio_upper <= 1.0) {
        r.regime = Regime::Saturated;
    } else if (r.ratio_upper >= need && r.ratio_lower >= need) {
        r.regime = Regime::ClearEit;
    } else {
        r.regime = Regime::Marginal;
    }
    return r;
}

}  // namespace eitnoise
