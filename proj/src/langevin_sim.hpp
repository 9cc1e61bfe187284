#pragma once

// Time-domain check of the symmetrized noise spectrum: the slow c-number
// Langevin equations for (sigma31, sigma21) driven by white noise with the
// symmetrized force covariance, an ensemble of trajectories, and Welch PSDs.

#include "fdt_verifier.hpp"
#include "welch.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace eitnoise {

/// d/dt (sigma31, sigma21) = M (sigma31, sigma21) + (f31, f21).
Eigen::Matrix2cd drift_matrix(const LambdaSystem& system, const RelaxationModel& model,
                              double delta_p);

/// Real 4x4 form acting on (Re s31, Im s31, Re s21, Im s21).
Eigen::Matrix4d real_drift(const Eigen::Matrix2cd& m);

/// Covariance per unit time of (Re f31, Im f31, Re f21, Im f21) realizing the
/// symmetrized correlators.
Eigen::Matrix4d symmetrized_force_covariance(const DiffusionMatrix& d);

/// Lower-triangular L with L L^T = c for positive semidefinite c (zero pivots
/// allowed). Throws Error(NotPositiveSemidefinite) otherwise.
Eigen::Matrix4d semidefinite_cholesky(const Eigen::Matrix4d& c, double relative_tolerance = 1e-12);

/// Factor of the symmetrized force covariance.
Eigen::Matrix4d noise_cholesky(const DiffusionMatrix& d);

/// Solves M S + S M^T + C = 0.
Eigen::Matrix4d stationary_covariance(const Eigen::Matrix4d& m, const Eigen::Matrix4d& c);

enum class Integrator { Exact, EulerMaruyama };

std::string integrator_name(Integrator integrator);
Integrator integrator_from_name(const std::string& name);

struct WelchConfig {
    std::size_t segment_length = 0;  // 0: n_steps / 8
    double overlap = 0.5;
    WindowKind window = WindowKind::Hann;
};

struct SimulationConfig {
    double dt = 0.02;
    std::size_t n_steps = 200000;
    std::size_t n_traj = 10000;
    std::uint64_t seed = 1;
    double burn_in = 0.1;  // fraction of n_steps, raised to 10 slowest decay times
    WelchConfig welch;
    double delta_p = 0.0;
    Integrator integrator = Integrator::Exact;
    double band_halfwidth = 5.0;  // |nu| range for band power and comparisons
    unsigned workers = 0;         // 0: hardware concurrency
};

inline constexpr double kDtGuard = 0.05;
inline constexpr std::size_t kBlockSize = 64;

/// Throws Error(GuardViolated) naming the violated condition.
void check_simulation_config(const LambdaSystem& system, const RelaxationModel& model,
                             const SimulationConfig& config);

struct SimSpectrum {
    std::vector<double> nu_grid;
    std::vector<double> psd_mean;
    std::vector<double> psd_stderr;
    double band_power_mean = 0.0;
    double band_power_stderr = 0.0;

    SimulationConfig config;
    std::uint64_t system_hash = 0;
    std::size_t burn_in_steps = 0;
    std::size_t segment_length = 0;
    std::size_t segments_per_trajectory = 0;
};

std::size_t burn_in_steps(const LambdaSystem& system, const RelaxationModel& model,
                          const SimulationConfig& config);

/// Deterministic for given (seed, config, system) whatever the worker count.
SimSpectrum simulate_ensemble(const LambdaSystem& system, const RelaxationModel& model,
                              const SteadyState& state, const DiffusionMatrix& d,
                              const SimulationConfig& config);

struct SimComparison {
    std::vector<double> nu_grid;
    std::vector<double> psd_mean;
    std::vector<double> psd_stderr;
    std::vector<double> expected;  // mean of the Welch estimator for the analytic spectrum
    std::vector<double> analytic;  // assembled symmetrized spectrum at the bin centres
    std::vector<double> relative_deviation;  // vs expected
    std::vector<double> z_score;

    double max_relative_deviation = 0.0;      // within the band
    double max_raw_relative_deviation = 0.0;  // vs analytic, within the band
    double band_power_expected = 0.0;
    double band_power_z = 0.0;
    double fraction_within_3sigma = 0.0;
    std::size_t band_bins = 0;
};

/// Compares a simulated spectrum with the symmetrized spectrum assembled in
/// the frequency domain, passed through the same estimator.
SimComparison compare_with_analytic(const LambdaSystem& system, const RelaxationModel& model,
                                    const SteadyState& state, const SimSpectrum& sim);

}  // namespace eitnoise
