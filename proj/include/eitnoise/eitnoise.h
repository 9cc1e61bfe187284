/*
 * eitnoise: noise polarization of a coherently driven three-level Lambda
 * medium. C interface over opaque handles; every call returns an eitn_status
 * and, on failure, leaves a message readable through eitn_last_error() on the
 * calling thread.
 *
 * Rates, detunings and frequency offsets are in internal units: as given for
 * dimensionless configs, in units of gamma31 for SI configs (see
 * eitn_system_info.rate_unit). Spectra are coefficients of delta(w - w') with
 * hbar = 1, scaled by dipole_scale.
 */
#ifndef EITNOISE_EITNOISE_H
#define EITNOISE_EITNOISE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EITN_BUILDING_LIBRARY)
#    define EITN_API __declspec(dllexport)
#  else
#    define EITN_API __declspec(dllimport)
#  endif
#else
#  define EITN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eitn_status {
    EITN_OK = 0,
    EITN_ERR_INVALID_ARGUMENT = 1,
    EITN_ERR_CONFIG = 2,
    EITN_ERR_NO_STEADY_STATE = 3,
    EITN_ERR_NON_STATIONARY = 4,
    EITN_ERR_GAIN_MEDIUM = 5,
    EITN_ERR_UNDAMPED_RESONANCE = 6,
    EITN_ERR_NOT_PSD = 7,
    EITN_ERR_UNSTABLE = 8,
    EITN_ERR_GUARD = 9,
    EITN_ERR_UNKNOWN_PAIR = 10,
    EITN_ERR_PROVENANCE = 11,
    EITN_ERR_IO = 12,
    EITN_ERR_INTERNAL = 99
} eitn_status;

EITN_API const char* eitn_version(void);
EITN_API const char* eitn_status_name(eitn_status status);
/* Message of the last failed call on this thread; "" if none. */
EITN_API const char* eitn_last_error(void);
/* Frees strings returned through char** out-parameters. */
EITN_API void eitn_string_free(char* s);

/* ---- system ----------------------------------------------------------- */

typedef struct eitn_system eitn_system;

typedef enum eitn_axis {
    EITN_AXIS_DRIVE = 0,
    EITN_AXIS_DELTA = 1,
    EITN_AXIS_TEMPERATURE = 2,
    EITN_AXIS_GAMMA21 = 3,
    EITN_AXIS_OMEGA21 = 4
} eitn_axis;

typedef struct eitn_grid {
    double min;
    double max;
    size_t n_points;
    int log_spacing;
} eitn_grid;

typedef struct eitn_sweep {
    eitn_axis axis;
    eitn_grid range;
    double delta; /* probe detuning reported along non-delta axes */
} eitn_sweep;

typedef enum eitn_integrator { EITN_INTEGRATOR_EXACT = 0, EITN_INTEGRATOR_EULER = 1 } eitn_integrator;
typedef enum eitn_window { EITN_WINDOW_HANN = 0, EITN_WINDOW_RECTANGULAR = 1 } eitn_window;

typedef struct eitn_sim_config {
    double dt;
    size_t n_steps;
    size_t n_traj;
    uint64_t seed;
    double burn_in;
    size_t segment_length; /* 0: n_steps / 8 */
    double overlap;
    eitn_window window;
    double delta_p;
    eitn_integrator integrator;
    double band_halfwidth;
    unsigned workers; /* 0: hardware concurrency */
} eitn_sim_config;

/* Parses a JSON config document, converts to internal units and solves the
 * steady state. */
EITN_API eitn_status eitn_system_from_json(const char* json_text, eitn_system** out);
/* Copy with one parameter replaced (internal units; kelvin for temperature). */
EITN_API eitn_status eitn_system_with(const eitn_system* sys, eitn_axis axis, double value,
                                      eitn_system** out);
EITN_API void eitn_system_free(eitn_system* sys);
/* Normalized config document (internal units) as a JSON string. */
EITN_API eitn_status eitn_system_to_json(const eitn_system* sys, char** out_json);

typedef struct eitn_system_info {
    double rate_unit; /* input rate units per internal unit */
    double gamma31, gamma21, gamma32;
    double n21, n31, n32;
    double log_n21, log_n31, log_n32;
    double x21, x31, x32;
    int planck_consistent;
    int kelvin_mode;
    double drive_re, drive_im;
    uint64_t fingerprint;
} eitn_system_info;

EITN_API eitn_status eitn_system_info_get(const eitn_system* sys, eitn_system_info* out);

/* Optional config blocks; *present says whether the block was in the file
 * (defaults are filled in either way). */
EITN_API eitn_status eitn_system_grid(const eitn_system* sys, eitn_grid* out, int* present);
EITN_API eitn_status eitn_system_simulation(const eitn_system* sys, eitn_sim_config* out,
                                            int* present);
EITN_API eitn_status eitn_system_sweep(const eitn_system* sys, eitn_sweep* out, int* present);

/* "min:max:n[:log]" */
EITN_API eitn_status eitn_parse_grid(const char* text, eitn_grid* out);
/* Fills values[0 .. grid->n_points). */
EITN_API eitn_status eitn_grid_values(const eitn_grid* grid, double* values);
EITN_API eitn_status eitn_axis_from_name(const char* name, eitn_axis* out);
EITN_API const char* eitn_axis_name(eitn_axis axis);

/* ---- steady state ----------------------------------------------------- */

typedef struct eitn_steady {
    double rho11, rho22, rho33;
    double sigma32_re, sigma32_im;
    double n23, n13;
    double stationarity_residual;
} eitn_steady;

typedef enum eitn_regime_kind {
    EITN_REGIME_UNDRIVEN = 0,
    EITN_REGIME_CLEAR_EIT = 1,
    EITN_REGIME_MARGINAL = 2,
    EITN_REGIME_SATURATED = 3,
    EITN_REGIME_AWI_RISK = 4
} eitn_regime_kind;

typedef struct eitn_regime {
    eitn_regime_kind kind;
    const char* name; /* static string */
    double ratio_upper; /* gamma31^2 / |Omega_d|^2 */
    double ratio_lower; /* |Omega_d|^2 / (gamma21 gamma31) */
    double t31_over_t32;
    int gain_possible;
    int awi_risk;
    int coherence_bound_ok;
} eitn_regime;

EITN_API const char* eitn_regime_name(eitn_regime_kind kind);
EITN_API eitn_status eitn_steady_state(const eitn_system* sys, eitn_steady* out);
EITN_API eitn_status eitn_regime_report(const eitn_system* sys, eitn_regime* out);
/* Closed-form rho22/rho11, rho33/rho11; corrected != 0 selects the T32 form. */
EITN_API eitn_status eitn_population_ratios(const eitn_system* sys, int corrected,
                                            double* rho22_over_rho11, double* rho33_over_rho11);

/* ---- Einstein relations ---------------------------------------------- */

#define EITN_N_FORCES 6 /* f31 f13 f21 f12 f32 f23 */

typedef enum eitn_route { EITN_ROUTE_GENERAL = 0, EITN_ROUTE_OFFDIAGONAL = 1 } eitn_route;

typedef struct eitn_force_info {
    const char* name;
    const char* basis_note;
    int carrier_probe; /* carrier = probe * omega_p + drive * omega_d */
    int carrier_drive;
} eitn_force_info;

EITN_API eitn_status eitn_force_info_get(int index, eitn_force_info* out);
/* 2D_ab, 6x6 row-major in eitn_force_info order. */
EITN_API eitn_status eitn_diffusion(const eitn_system* sys, eitn_route route, double* re36,
                                    double* im36);
/* <f_a(w) f_b(w')> = coefficient * delta(w + w' - shift). */
EITN_API eitn_status eitn_spectral_correlator(const eitn_system* sys, int a, int b, double* re,
                                              double* im, int* shift_probe, int* shift_drive);
EITN_API eitn_status eitn_covariance_psd(const eitn_system* sys, double* min_eigenvalue,
                                         double* trace, int* ok);

/* ---- response and spectra -------------------------------------------- */

EITN_API eitn_status eitn_transfer_functions(const eitn_system* sys, double delta_p,
                                             const double* nu, size_t n, double* h31_re,
                                             double* h31_im, double* h21_re, double* h21_im);
/* Imaginary part of chi^aH at detuning delta (the real part is zero). */
EITN_API eitn_status eitn_susceptibility(const eitn_system* sys, double delta, double* chi_imag);
/* Fails with EITN_ERR_GAIN_MEDIUM where the medium amplifies. */
EITN_API eitn_status eitn_noise_factor(const eitn_system* sys, double delta, double* s);

typedef struct eitn_limits {
    double s_resonant;
    double s_resonant_einstein;
    double s_low_temperature;
    double s_a21_zero;
    double s_omega21_to_zero;
    int t21_dominant;
    int r3_small;
    int r3_below_r2;
    int t31_matches_t32;
    int low_temperature;
    int a21_zero;
} eitn_limits;

EITN_API eitn_status eitn_limiting_s(const eitn_system* sys, eitn_limits* out);

typedef struct eitn_spectrum_row {
    double delta;
    double s_analytic; /* NaN in gain rows */
    double s_assembled;
    double chi_aH_imag;
    double commutator_residual;
    double ordering_residual;
    double fdt_violation;
    double log10_fdt_violation;
    int gain;
    double normally_ordered;
    double anti_normally_ordered;
    double symmetrized;
    double antisymmetric;
} eitn_spectrum_row;

EITN_API eitn_status eitn_spectrum(const eitn_system* sys, eitn_route route, const double* delta,
                                   size_t n, eitn_spectrum_row* rows);

typedef struct eitn_fdt_report {
    double max_s_deviation;
    double max_s_relative;
    double max_commutator_residual;
    double max_ordering_residual;
    double min_fdt_violation;
    double max_fdt_violation;
    size_t gain_rows;
    int passed;
} eitn_fdt_report;

EITN_API eitn_status eitn_verify_fdt(const eitn_spectrum_row* rows, size_t n, double tolerance,
                                     eitn_fdt_report* out);

/* ---- Langevin simulation --------------------------------------------- */

typedef struct eitn_sim_spectrum eitn_sim_spectrum;

typedef struct eitn_sim_info {
    size_t n_bins;
    size_t burn_in_steps;
    size_t segment_length;
    size_t segments_per_trajectory;
    double band_power_mean;
    double band_power_stderr;
    uint64_t system_hash;
} eitn_sim_info;

typedef struct eitn_sim_row {
    double nu;
    double psd_mean;
    double psd_stderr;
    double expected; /* analytic spectrum through the same estimator */
    double analytic; /* assembled symmetrized spectrum at nu */
    double relative_deviation;
    double z_score;
} eitn_sim_row;

typedef struct eitn_sim_summary {
    double max_relative_deviation;
    double max_raw_relative_deviation;
    double band_power_expected;
    double band_power_z;
    double fraction_within_3sigma;
    size_t band_bins;
} eitn_sim_summary;

EITN_API eitn_status eitn_drift_matrix(const eitn_system* sys, double delta_p, double* re4,
                                       double* im4);
/* Lower-triangular 4x4 factor (row-major) of the symmetrized force covariance. */
EITN_API eitn_status eitn_noise_cholesky(const eitn_system* sys, double* l16);
EITN_API eitn_status eitn_simulate(const eitn_system* sys, const eitn_sim_config* config,
                                   eitn_sim_spectrum** out);
EITN_API eitn_status eitn_sim_info_get(const eitn_sim_spectrum* sim, eitn_sim_info* out);
/* rows[0 .. n_bins); summary may be NULL. */
EITN_API eitn_status eitn_sim_compare(const eitn_system* sys, const eitn_sim_spectrum* sim,
                                      eitn_sim_row* rows, eitn_sim_summary* summary);
EITN_API void eitn_sim_free(eitn_sim_spectrum* sim);

#ifdef __cplusplus
}
#endif

#endif
