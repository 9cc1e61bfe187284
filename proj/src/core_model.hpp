#pragma once

// Physical description of the driven three-level Lambda medium and its
// Bloch-Redfield relaxation model.
//
// Levels are numbered 1, 2, 3 in physics notation (|1>, |2> lower, |3> upper)
// and stored 0-based; use the L1/L2/L3 constants when indexing matrices.

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <optional>
#include <variant>

namespace eitnoise {

using cplx = std::complex<double>;

inline constexpr int L1 = 0;
inline constexpr int L2 = 1;
inline constexpr int L3 = 2;

namespace constants {
// CODATA 2018 exact/recommended values.
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

enum class Units { Dimensionless, SI };

struct Kelvin {
    double value = 0.0;
};

// Thermal photon numbers given directly, bypassing the temperature.
struct Occupations {
    double n21 = 0.0;
    double n31 = 0.0;
    double n32 = 0.0;
};

using TemperatureMode = std::variant<Kelvin, Occupations>;

struct LambdaSystem {
    Units units = Units::Dimensionless;
    // rad/s represented by one unit of omega31/omega21. Only consulted in
    // dimensionless units with a Kelvin temperature.
    double frequency_unit = 0.0;

    double omega31 = 0.0;
    double omega21 = 0.0;

    double a21 = 0.0;
    double a31 = 0.0;
    double a32 = 0.0;

    // Transverse rates; unset entries are filled from the radiative limit.
    std::optional<double> gamma31;
    std::optional<double> gamma21;
    std::optional<double> gamma32;

    double dipole_scale = 1.0;  // |d31|^2 / hbar
    TemperatureMode temperature = Occupations{};
    cplx drive_rabi{0.0, 0.0};

    double omega32() const { return omega31 - omega21; }
};

// Throws Error(Config) naming the offending field.
void validate(const LambdaSystem& system);

// Occupations and their logarithms for the three transitions. The logs stay
// finite where the occupations underflow (optical transitions at kelvin
// temperatures).
struct ThermalState {
    double n21 = 0.0, n31 = 0.0, n32 = 0.0;
    double log_n21 = 0.0, log_n31 = 0.0, log_n32 = 0.0;
    // x = hbar omega / k_B T per transition; +inf at T = 0.
    double x21 = 0.0, x31 = 0.0, x32 = 0.0;
    // x31 == x21 + x32, i.e. one temperature describes all three transitions.
    bool planck_consistent = true;
};

ThermalState thermal_state(const LambdaSystem& system);

/// Bose-Einstein occupation 1/(e^x - 1) of a mode with reduced energy
/// x = hbar omega / k_B T. x = +inf (zero temperature) gives 0.
double thermal_occupation(double x);

/// Same, from an angular frequency [rad/s] and a temperature [K].
double thermal_occupation(double omega, double kelvin);

/// ln n_T(x), accurate for x large enough that n_T underflows.
double log_thermal_occupation(double x);

/// Inverse of thermal_occupation: x = ln(1 + 1/n). n = 0 gives +inf.
double planck_exponent_from_occupation(double n);

struct RelaxationModel {
    // w(to, from): longitudinal rate from level `from` into level `to`.
    // The diagonal closes each column to zero.
    Eigen::Matrix3d w = Eigen::Matrix3d::Zero();
    // Symmetric transverse rates gamma_mn, zero diagonal.
    Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();

    double gamma31() const { return gamma(L3, L1); }
    double gamma21() const { return gamma(L2, L1); }
    double gamma32() const { return gamma(L3, L2); }

    // Total relaxation out-rate of a level, Gamma_m = sum_{n != m} w_nm.
    double depopulation(int level) const { return -w(level, level); }
};

RelaxationModel build_relaxation(const LambdaSystem& system);

/// gamma_mn = (Gamma_m + Gamma_n) / 2 from the longitudinal rates.
Eigen::Matrix3d radiative_transverse_rates(const RelaxationModel& model);

/// Longitudinal relaxation time T_ij = 1/(A_ij (n_ij + 1)); +inf when A_ij = 0.
struct RelaxationTimes {
    double t21 = 0.0, t31 = 0.0, t32 = 0.0;
};
RelaxationTimes relaxation_times(const LambdaSystem& system);

// A system expressed in internal units: rates and frequencies divided by the
// reference rate (gamma31 for SI input, unity otherwise).
struct InternalSystem {
    LambdaSystem system;
    double rate_unit = 1.0;  // input units per internal unit
};

InternalSystem to_internal_units(const LambdaSystem& system);

}  // namespace eitnoise
