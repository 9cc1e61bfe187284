#pragma once

// Diffusion coefficients of the Langevin forces acting on the density-matrix
// operators, from the relaxation model and the stationary state.
//
// Forces are stored for the slow (rotating-frame) variables. With level phases
// theta_1 = 0, theta_2 = omega_p - omega_d, theta_3 = omega_p the lab-frame
// force is F_mn = f_mn exp(-i (theta_m - theta_n) t), and because the
// relaxation model is secular every coefficient of <f f> is time independent.

#include "steady_state.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace eitnoise {

enum class Force { F31 = 0, F13, F21, F12, F32, F23 };

inline constexpr std::array<Force, 6> kAllForces = {Force::F31, Force::F13, Force::F21,
                                                    Force::F12, Force::F32, Force::F23};

struct LevelPair {
    int m;
    int n;
};

LevelPair force_levels(Force f);
Force force_of(int m, int n);  // 0-based levels, m != n
Force adjoint(Force f);        // f_mn -> f_nm
std::string_view force_name(Force f);
std::optional<Force> force_from_name(std::string_view name);

/// Carrier of a force as integer multiples of (omega_p, omega_d).
struct Carrier {
    int probe = 0;
    int drive = 0;
};
Carrier carrier(Force f);
std::string_view basis_note(Force f);

using DiffusionEntries = Eigen::Matrix<cplx, 6, 6>;

struct DiffusionMatrix {
    // entries(a, b) = 2 D_ab, the coefficient of delta(t - t') in <f_a(t) f_b(t')>.
    DiffusionEntries entries = DiffusionEntries::Zero();
    std::uint64_t provenance = 0;

    cplx operator()(Force a, Force b) const {
        return entries(static_cast<int>(a), static_cast<int>(b));
    }
};

/// Bloch-Redfield superoperator r_mnpq of the constant-rate model:
/// R_mn = sum_pq r_mnpq rho_pq (0-based level indices).
struct RelaxationSuperoperator {
    std::array<cplx, 81> r{};

    cplx operator()(int m, int n, int p, int q) const { return r[((m * 3 + n) * 3 + p) * 3 + q]; }
    cplx& operator()(int m, int n, int p, int q) { return r[((m * 3 + n) * 3 + p) * 3 + q]; }
};

RelaxationSuperoperator relaxation_superoperator(const RelaxationModel& model);

/// Stationary <rho_mn> in the rotating frame: populations and sigma32.
Eigen::Matrix3cd rotating_frame_density(const SteadyState& state);

/// Generalized Einstein relation for the full superoperator:
/// 2D_mnpq = delta_mq <R_pn> - sum_l r_mnql <rho_pl> - sum_k r_pqkm <rho_kn>.
/// Throws Error(NonStationary) when the state is not stationary.
DiffusionMatrix diffusion_general(const LambdaSystem& system, const RelaxationModel& model,
                                  const SteadyState& state);

/// Off-diagonal closed form 2D_mnpq = delta_mq ((g_mn + g_pq) <rho_pn> + <R_pn>),
/// evaluated straight from gamma and w.
DiffusionMatrix diffusion_offdiagonal(const LambdaSystem& system, const RelaxationModel& model,
                                      const SteadyState& state);

/// 2D_mnnm = 2 gamma_mn <rho_nn> + <R_nn>.
double autocorrelation_coefficient(const RelaxationModel& model, const SteadyState& state, int m,
                                   int n);

/// 2D_mabm = (gamma_am + gamma_bm - gamma_ab) <rho_ba>, rotating frame.
cplx cross_correlation_coefficient(const RelaxationModel& model, const SteadyState& state, int m,
                                   int a, int b);

/// Stationary <R_nn> = sum_k w_nk rho_kk.
double mean_relaxation(const RelaxationModel& model, const SteadyState& state, int level);

inline constexpr double kStationarityTolerance = 1e-9;

/// Spectral form <f_a(w) f_b(w')> = coefficient * delta(w + w' - shift) with
/// shift = probe * omega_p + drive * omega_d in the lab frame.
struct SpectralCorrelator {
    cplx coefficient{0.0, 0.0};  // 2D_ab / (2 pi)
    Carrier shift;
};

SpectralCorrelator spectral_force_correlator(const DiffusionMatrix& d, Force a, Force b);
/// Integer-indexed variant (indices in kAllForces order); throws UnknownPair.
SpectralCorrelator spectral_force_correlator(const DiffusionMatrix& d, int a, int b);

/// G_ab = (<f_a f_b^+> + <f_b^+ f_a>) / 2 over all six forces; Hermitian.
DiffusionEntries symmetrized_covariance(const DiffusionMatrix& d);

struct PsdCheck {
    double min_eigenvalue = 0.0;
    double trace = 0.0;
    bool ok = true;
};

PsdCheck check_symmetrized_psd(const DiffusionMatrix& d, double relative_tolerance = 1e-12);

}  // namespace eitnoise
