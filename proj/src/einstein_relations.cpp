#include "einstein_relations.hpp"

#include "error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace eitnoise {

namespace {

constexpr std::array<LevelPair, 6> kLevels = {
    LevelPair{L3, L1}, LevelPair{L1, L3}, LevelPair{L2, L1},
    LevelPair{L1, L2}, LevelPair{L3, L2}, LevelPair{L2, L3},
};

constexpr std::array<std::string_view, 6> kNames = {"f31", "f13", "f21", "f12", "f32", "f23"};

// Level phases theta_m in units of (omega_p, omega_d).
constexpr std::array<Carrier, 3> kLevelPhase = {Carrier{0, 0}, Carrier{1, -1}, Carrier{1, 0}};

void require_stationary(const LambdaSystem& system, const RelaxationModel& model,
                        const SteadyState& state) {
    const double res = stationarity_residual(system, model, state);
    if (!(res < kStationarityTolerance)) {
        throw Error(ErrorCode::NonStationary,
                    "state is not stationary for this relaxation model (residual " +
                        std::to_string(res) + ")");
    }
}

}  // namespace

LevelPair force_levels(Force f) { return kLevels[static_cast<int>(f)]; }

Force force_of(int m, int n) {
    for (Force f : kAllForces) {
        const LevelPair lp = force_levels(f);
        if (lp.m == m && lp.n == n) return f;
    }
    throw Error(ErrorCode::UnknownPair, "no force for a diagonal level pair");
}

Force adjoint(Force f) {
    const LevelPair lp = force_levels(f);
    return force_of(lp.n, lp.m);
}

std::string_view force_name(Force f) { return kNames[static_cast<int>(f)]; }

std::optional<Force> force_from_name(std::string_view name) {
    for (Force f : kAllForces) {
        if (force_name(f) == name) return f;
    }
    return std::nullopt;
}

Carrier carrier(Force f) {
    const LevelPair lp = force_levels(f);
    return {kLevelPhase[lp.m].probe - kLevelPhase[lp.n].probe,
            kLevelPhase[lp.m].drive - kLevelPhase[lp.n].drive};
}

std::string_view basis_note(Force f) {
    switch (f) {
        case Force::F31:
        case Force::F13: return "probe band: F = f exp(-/+ i omega_p t)";
        case Force::F21:
        case Force::F12: return "low-frequency band: F = f exp(-/+ i (omega_p - omega_d) t)";
        case Force::F32:
        case Force::F23: return "drive band: F = f exp(-/+ i omega_d t)";
    }
    return "";
}

RelaxationSuperoperator relaxation_superoperator(const RelaxationModel& model) {
    RelaxationSuperoperator r;
    for (int m = 0; m < 3; ++m) {
        for (int n = 0; n < 3; ++n) {
            if (m == n) {
                for (int k = 0; k < 3; ++k) r(m, m, k, k) = model.w(m, k);
            } else {
                r(m, n, m, n) = -model.gamma(m, n);
            }
        }
    }
    return r;
}

Eigen::Matrix3cd rotating_frame_density(const SteadyState& state) {
    Eigen::Matrix3cd rho = Eigen::Matrix3cd::Zero();
    rho(L1, L1) = state.rho11;
    rho(L2, L2) = state.rho22;
    rho(L3, L3) = state.rho33;
    rho(L3, L2) = state.sigma32;
    rho(L2, L3) = std::conj(state.sigma32);
    return rho;
}

DiffusionMatrix diffusion_general(const LambdaSystem& system, const RelaxationModel& model,
                                  const SteadyState& state) {
    require_stationary(system, model, state);
    const RelaxationSuperoperator r = relaxation_superoperator(model);
    const Eigen::Matrix3cd rho = rotating_frame_density(state);

    Eigen::Matrix3cd mean_r = Eigen::Matrix3cd::Zero();
    for (int p = 0; p < 3; ++p)
        for (int n = 0; n < 3; ++n)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) mean_r(p, n) += r(p, n, k, l) * rho(k, l);

    DiffusionMatrix d;
    for (Force fa : kAllForces) {
        const auto [m, n] = force_levels(fa);
        for (Force fb : kAllForces) {
            const auto [p, q] = force_levels(fb);
            cplx v = m == q ? mean_r(p, n) : cplx{};
            for (int l = 0; l < 3; ++l) v -= r(m, n, q, l) * rho(p, l);
            for (int k = 0; k < 3; ++k) v -= r(p, q, k, m) * rho(k, n);
            d.entries(static_cast<int>(fa), static_cast<int>(fb)) = v;
        }
    }
    d.provenance = medium_fingerprint(system, model, state);
    return d;
}

double mean_relaxation(const RelaxationModel& model, const SteadyState& state, int level) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k) v += model.w(level, k) * state.population(k);
    return v;
}

DiffusionMatrix diffusion_offdiagonal(const LambdaSystem& system, const RelaxationModel& model,
                                      const SteadyState& state) {
    require_stationary(system, model, state);
    const Eigen::Matrix3cd rho = rotating_frame_density(state);
    auto mean_r = [&](int p, int n) -> cplx {
        if (p == n) return mean_relaxation(model, state, p);
        return -model.gamma(p, n) * rho(p, n);
    };

    DiffusionMatrix d;
    for (Force fa : kAllForces) {
        const auto [m, n] = force_levels(fa);
        for (Force fb : kAllForces) {
            const auto [p, q] = force_levels(fb);
            if (m != q) continue;
            d.entries(static_cast<int>(fa), static_cast<int>(fb)) =
                (model.gamma(m, n) + model.gamma(p, q)) * rho(p, n) + mean_r(p, n);
        }
    }
    d.provenance = medium_fingerprint(system, model, state);
    return d;
}

double autocorrelation_coefficient(const RelaxationModel& model, const SteadyState& state, int m,
                                   int n) {
    return 2.0 * model.gamma(m, n) * state.population(n) + mean_relaxation(model, state, n);
}

cplx cross_correlation_coefficient(const RelaxationModel& model, const SteadyState& state, int m,
                                   int a, int b) {
    const Eigen::Matrix3cd rho = rotating_frame_density(state);
    return (model.gamma(a, m) + model.gamma(b, m) - model.gamma(a, b)) * rho(b, a);
}

SpectralCorrelator spectral_force_correlator(const DiffusionMatrix& d, Force a, Force b) {
    const Carrier ca = carrier(a);
    const Carrier cb = carrier(b);
    return {d(a, b) / (2.0 * std::numbers::pi), Carrier{ca.probe + cb.probe, ca.drive + cb.drive}};
}

SpectralCorrelator spectral_force_correlator(const DiffusionMatrix& d, int a, int b) {
    if (a < 0 || a >= 6 || b < 0 || b >= 6) {
        throw Error(ErrorCode::UnknownPair, "unknown force pair (" + std::to_string(a) + ", " +
                                                std::to_string(b) + ")");
    }
    return spectral_force_correlator(d, static_cast<Force>(a), static_cast<Force>(b));
}

DiffusionEntries symmetrized_covariance(const DiffusionMatrix& d) {
    DiffusionEntries g;
    for (Force a : kAllForces) {
        for (Force b : kAllForces) {
            const Force bd = adjoint(b);
            g(static_cast<int>(a), static_cast<int>(b)) = 0.5 * (d(a, bd) + d(bd, a));
        }
    }
    return g;
}

PsdCheck check_symmetrized_psd(const DiffusionMatrix& d, double relative_tolerance) {
    const DiffusionEntries g = symmetrized_covariance(d);
    Eigen::SelfAdjointEigenSolver<DiffusionEntries> es(g, Eigen::EigenvaluesOnly);
    PsdCheck c;
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    c.trace = g.trace().real();
    c.ok = c.min_eigenvalue >= -relative_tolerance * std::max(std::abs(c.trace), 1e-300);
    return c;
}

}  // namespace eitnoise
