#include "eitnoise/eitnoise.h"

#include "config.hpp"
#include "error.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

using namespace eitnoise;

struct eitn_system {
    RunConfig config;  // system held in internal units
    double rate_unit = 1.0;
    RelaxationModel model;
    SteadyState state;
};

struct eitn_sim_spectrum {
    SimSpectrum spectrum;
};

namespace {

thread_local std::string g_last_error;

template <class F>
eitn_status guarded(F&& f) {
    try {
        g_last_error.clear();
        f();
        return EITN_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<eitn_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return EITN_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return EITN_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return EITN_ERR_INTERNAL;
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

eitn_system* make_system(RunConfig config, double rate_unit) {
    auto* sys = new eitn_system;
    try {
        sys->config = std::move(config);
        sys->rate_unit = rate_unit;
        sys->model = build_relaxation(sys->config.system);
        sys->state = steady_populations(sys->model, sys->config.system);
    } catch (...) {
        delete sys;
        throw;
    }
    return sys;
}

eitn_grid to_c(const GridSpec& g) { return {g.min, g.max, g.n_points, g.log ? 1 : 0}; }

GridSpec from_c(const eitn_grid& g) { return {g.min, g.max, g.n_points, g.log_spacing != 0}; }

eitn_sim_config to_c(const SimulationConfig& c) {
    eitn_sim_config o;
    o.dt = c.dt;
    o.n_steps = c.n_steps;
    o.n_traj = c.n_traj;
    o.seed = c.seed;
    o.burn_in = c.burn_in;
    o.segment_length = c.welch.segment_length;
    o.overlap = c.welch.overlap;
    o.window = c.welch.window == WindowKind::Hann ? EITN_WINDOW_HANN : EITN_WINDOW_RECTANGULAR;
    o.delta_p = c.delta_p;
    o.integrator = c.integrator == Integrator::Exact ? EITN_INTEGRATOR_EXACT : EITN_INTEGRATOR_EULER;
    o.band_halfwidth = c.band_halfwidth;
    o.workers = c.workers;
    return o;
}

SimulationConfig from_c(const eitn_sim_config& o) {
    SimulationConfig c;
    c.dt = o.dt;
    c.n_steps = o.n_steps;
    c.n_traj = o.n_traj;
    c.seed = o.seed;
    c.burn_in = o.burn_in;
    c.welch.segment_length = o.segment_length;
    c.welch.overlap = o.overlap;
    c.welch.window = o.window == EITN_WINDOW_HANN ? WindowKind::Hann : WindowKind::Rectangular;
    c.delta_p = o.delta_p;
    c.integrator = o.integrator == EITN_INTEGRATOR_EXACT ? Integrator::Exact
                                                         : Integrator::EulerMaruyama;
    c.band_halfwidth = o.band_halfwidth;
    c.workers = o.workers;
    return c;
}

SweepAxis from_c(eitn_axis a) {
    switch (a) {
        case EITN_AXIS_DRIVE: return SweepAxis::Drive;
        case EITN_AXIS_DELTA: return SweepAxis::Delta;
        case EITN_AXIS_TEMPERATURE: return SweepAxis::Temperature;
        case EITN_AXIS_GAMMA21: return SweepAxis::Gamma21;
        case EITN_AXIS_OMEGA21: return SweepAxis::Omega21;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown axis");
}

eitn_axis to_c(SweepAxis a) { return static_cast<eitn_axis>(static_cast<int>(a)); }

DiffusionMatrix diffusion_of(const eitn_system* sys, eitn_route route) {
    return route == EITN_ROUTE_OFFDIAGONAL
               ? diffusion_offdiagonal(sys->config.system, sys->model, sys->state)
               : diffusion_general(sys->config.system, sys->model, sys->state);
}

}  // namespace

extern "C" {

const char* eitn_version(void) { return "0.1.0"; }

const char* eitn_status_name(eitn_status status) {
    switch (status) {
        case EITN_OK: return "ok";
        case EITN_ERR_INVALID_ARGUMENT: return "invalid argument";
        case EITN_ERR_CONFIG: return "config error";
        case EITN_ERR_NO_STEADY_STATE: return "no unique steady state";
        case EITN_ERR_NON_STATIONARY: return "non-stationary state";
        case EITN_ERR_GAIN_MEDIUM: return "gain medium";
        case EITN_ERR_UNDAMPED_RESONANCE: return "undamped resonance";
        case EITN_ERR_NOT_PSD: return "covariance not positive semidefinite";
        case EITN_ERR_UNSTABLE: return "unstable integration";
        case EITN_ERR_GUARD: return "simulation guard violated";
        case EITN_ERR_UNKNOWN_PAIR: return "unknown force pair";
        case EITN_ERR_PROVENANCE: return "provenance mismatch";
        case EITN_ERR_IO: return "i/o error";
        case EITN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* eitn_last_error(void) { return g_last_error.c_str(); }

void eitn_string_free(char* s) { std::free(s); }

eitn_status eitn_system_from_json(const char* json_text, eitn_system** out) {
    return guarded([&] {
        require(json_text != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        RunConfig rc = parse_config_text(json_text);
        InternalSystem in = to_internal_units(rc.system);
        rc.system = in.system;
        *out = make_system(std::move(rc), in.rate_unit);
    });
}

eitn_status eitn_system_with(const eitn_system* sys, eitn_axis axis, double value,
                             eitn_system** out) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        RunConfig rc = sys->config;
        rc.system = with_axis_value(sys->config.system, from_c(axis), value);
        *out = make_system(std::move(rc), sys->rate_unit);
    });
}

void eitn_system_free(eitn_system* sys) { delete sys; }

eitn_status eitn_system_to_json(const eitn_system* sys, char** out_json) {
    return guarded([&] {
        require(sys != nullptr && out_json != nullptr, "null argument");
        nlohmann::json j = system_to_json(sys->config.system);
        if (sys->config.simulation) j["simulation"] = simulation_to_json(*sys->config.simulation);
        if (sys->config.grid) j["grid"] = grid_to_json(*sys->config.grid);
        if (sys->config.sweep) {
            j["sweep"] = {{"axis", axis_name(sys->config.sweep->axis)},
                          {"range", grid_to_json(sys->config.sweep->range)},
                          {"delta", sys->config.sweep->delta}};
        }
        j["regime"] = {{"much_greater", sys->config.regime.much_greater},
                       {"awi_factor", sys->config.regime.awi_factor}};
        *out_json = copy_string(j.dump());
    });
}

eitn_status eitn_system_info_get(const eitn_system* sys, eitn_system_info* out) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        const LambdaSystem& s = sys->config.system;
        const ThermalState th = thermal_state(s);
        *out = eitn_system_info{};
        out->rate_unit = sys->rate_unit;
        out->gamma31 = sys->model.gamma31();
        out->gamma21 = sys->model.gamma21();
        out->gamma32 = sys->model.gamma32();
        out->n21 = th.n21;
        out->n31 = th.n31;
        out->n32 = th.n32;
        out->log_n21 = th.log_n21;
        out->log_n31 = th.log_n31;
        out->log_n32 = th.log_n32;
        out->x21 = th.x21;
        out->x31 = th.x31;
        out->x32 = th.x32;
        out->planck_consistent = th.planck_consistent ? 1 : 0;
        out->kelvin_mode = std::holds_alternative<Kelvin>(s.temperature) ? 1 : 0;
        out->drive_re = s.drive_rabi.real();
        out->drive_im = s.drive_rabi.imag();
        out->fingerprint = medium_fingerprint(s, sys->model, sys->state);
    });
}

eitn_status eitn_system_grid(const eitn_system* sys, eitn_grid* out, int* present) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        *out = to_c(sys->config.grid.value_or(GridSpec{}));
        if (present) *present = sys->config.grid ? 1 : 0;
    });
}

eitn_status eitn_system_simulation(const eitn_system* sys, eitn_sim_config* out, int* present) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        *out = to_c(sys->config.simulation.value_or(SimulationConfig{}));
        if (present) *present = sys->config.simulation ? 1 : 0;
    });
}

eitn_status eitn_system_sweep(const eitn_system* sys, eitn_sweep* out, int* present) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        const SweepSpec s = sys->config.sweep.value_or(SweepSpec{});
        *out = {to_c(s.axis), to_c(s.range), s.delta};
        if (present) *present = sys->config.sweep ? 1 : 0;
    });
}

eitn_status eitn_parse_grid(const char* text, eitn_grid* out) {
    return guarded([&] {
        require(text != nullptr && out != nullptr, "null argument");
        *out = to_c(parse_grid(text));
    });
}

eitn_status eitn_grid_values(const eitn_grid* grid, double* values) {
    return guarded([&] {
        require(grid != nullptr && values != nullptr, "null argument");
        const std::vector<double> v = make_grid(from_c(*grid));
        std::copy(v.begin(), v.end(), values);
    });
}

eitn_status eitn_axis_from_name(const char* name, eitn_axis* out) {
    return guarded([&] {
        require(name != nullptr && out != nullptr, "null argument");
        *out = to_c(axis_from_name(name));
    });
}

const char* eitn_axis_name(eitn_axis axis) {
    switch (axis) {
        case EITN_AXIS_DRIVE: return "drive";
        case EITN_AXIS_DELTA: return "delta";
        case EITN_AXIS_TEMPERATURE: return "temperature";
        case EITN_AXIS_GAMMA21: return "gamma21";
        case EITN_AXIS_OMEGA21: return "omega21";
    }
    return "unknown";
}

eitn_status eitn_steady_state(const eitn_system* sys, eitn_steady* out) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        const SteadyState& s = sys->state;
        *out = {s.rho11,
                s.rho22,
                s.rho33,
                s.sigma32.real(),
                s.sigma32.imag(),
                s.n23,
                s.n13,
                stationarity_residual(sys->config.system, sys->model, s)};
    });
}

const char* eitn_regime_name(eitn_regime_kind kind) {
    switch (kind) {
        case EITN_REGIME_UNDRIVEN: return regime_name(Regime::Undriven).data();
        case EITN_REGIME_CLEAR_EIT: return regime_name(Regime::ClearEit).data();
        case EITN_REGIME_MARGINAL: return regime_name(Regime::Marginal).data();
        case EITN_REGIME_SATURATED: return regime_name(Regime::Saturated).data();
        case EITN_REGIME_AWI_RISK: return regime_name(Regime::AwiRisk).data();
    }
    return "unknown";
}

eitn_status eitn_regime_report(const eitn_system* sys, eitn_regime* out) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        const RegimeReport r =
            eit_regime_check(sys->config.system, sys->model, sys->state, sys->config.regime);
        out->kind = static_cast<eitn_regime_kind>(static_cast<int>(r.regime));
        out->name = regime_name(r.regime).data();
        out->ratio_upper = r.ratio_upper;
        out->ratio_lower = r.ratio_lower;
        out->t31_over_t32 = r.t31_over_t32;
        out->gain_possible = r.gain_possible ? 1 : 0;
        out->awi_risk = r.awi_risk ? 1 : 0;
        out->coherence_bound_ok = r.coherence_bound_ok ? 1 : 0;
    });
}

eitn_status eitn_population_ratios(const eitn_system* sys, int corrected,
                                   double* rho22_over_rho11, double* rho33_over_rho11) {
    return guarded([&] {
        require(sys != nullptr && rho22_over_rho11 != nullptr && rho33_over_rho11 != nullptr,
                "null argument");
        const auto r = closed_form_population_ratios(
            sys->config.system, sys->model,
            corrected ? PopulationFormula::Corrected : PopulationFormula::RepeatedT31);
        *rho22_over_rho11 = r[0];
        *rho33_over_rho11 = r[1];
    });
}

eitn_status eitn_force_info_get(int index, eitn_force_info* out) {
    return guarded([&] {
        require(out != nullptr, "null argument");
        if (index < 0 || index >= EITN_N_FORCES) {
            throw Error(ErrorCode::UnknownPair, "force index out of range");
        }
        const Force f = kAllForces[index];
        const Carrier c = carrier(f);
        out->name = force_name(f).data();
        out->basis_note = basis_note(f).data();
        out->carrier_probe = c.probe;
        out->carrier_drive = c.drive;
    });
}

eitn_status eitn_diffusion(const eitn_system* sys, eitn_route route, double* re36, double* im36) {
    return guarded([&] {
        require(sys != nullptr && re36 != nullptr && im36 != nullptr, "null argument");
        const DiffusionMatrix d = diffusion_of(sys, route);
        for (int a = 0; a < 6; ++a) {
            for (int b = 0; b < 6; ++b) {
                re36[a * 6 + b] = d.entries(a, b).real();
                im36[a * 6 + b] = d.entries(a, b).imag();
            }
        }
    });
}

eitn_status eitn_spectral_correlator(const eitn_system* sys, int a, int b, double* re, double* im,
                                     int* shift_probe, int* shift_drive) {
    return guarded([&] {
        require(sys != nullptr && re != nullptr && im != nullptr, "null argument");
        const SpectralCorrelator c = spectral_force_correlator(diffusion_of(sys, EITN_ROUTE_GENERAL), a, b);
        *re = c.coefficient.real();
        *im = c.coefficient.imag();
        if (shift_probe) *shift_probe = c.shift.probe;
        if (shift_drive) *shift_drive = c.shift.drive;
    });
}

eitn_status eitn_covariance_psd(const eitn_system* sys, double* min_eigenvalue, double* trace,
                                int* ok) {
    return guarded([&] {
        require(sys != nullptr, "null argument");
        const PsdCheck c = check_symmetrized_psd(diffusion_of(sys, EITN_ROUTE_GENERAL));
        if (min_eigenvalue) *min_eigenvalue = c.min_eigenvalue;
        if (trace) *trace = c.trace;
        if (ok) *ok = c.ok ? 1 : 0;
    });
}

eitn_status eitn_transfer_functions(const eitn_system* sys, double delta_p, const double* nu,
                                    size_t n, double* h31_re, double* h31_im, double* h21_re,
                                    double* h21_im) {
    return guarded([&] {
        require(sys != nullptr && (n == 0 || (nu && h31_re && h31_im && h21_re && h21_im)),
                "null argument");
        const ResponseKernel k = transfer_functions(sys->config.system, sys->model, sys->state,
                                                    delta_p, std::span<const double>(nu, n));
        for (size_t i = 0; i < n; ++i) {
            h31_re[i] = k.h31[i].real();
            h31_im[i] = k.h31[i].imag();
            h21_re[i] = k.h21[i].real();
            h21_im[i] = k.h21[i].imag();
        }
    });
}

eitn_status eitn_susceptibility(const eitn_system* sys, double delta, double* chi_imag) {
    return guarded([&] {
        require(sys != nullptr && chi_imag != nullptr, "null argument");
        *chi_imag = susceptibility_aH(sys->config.system, sys->model, sys->state, delta).imag();
    });
}

eitn_status eitn_noise_factor(const eitn_system* sys, double delta, double* s) {
    return guarded([&] {
        require(sys != nullptr && s != nullptr, "null argument");
        *s = noise_factor_S(sys->config.system, sys->model, sys->state, delta);
    });
}

eitn_status eitn_limiting_s(const eitn_system* sys, eitn_limits* out) {
    return guarded([&] {
        require(sys != nullptr && out != nullptr, "null argument");
        LimitOptions opt;
        opt.much_greater = sys->config.regime.much_greater;
        const LimitingS l = limiting_S(sys->config.system, opt);
        *out = {l.s_resonant,        l.s_resonant_einstein,   l.s_low_temperature,
                l.s_a21_zero,        l.s_omega21_to_zero,     l.t21_dominant ? 1 : 0,
                l.r3_small ? 1 : 0,  l.r3_below_r2 ? 1 : 0,   l.t31_matches_t32 ? 1 : 0,
                l.low_temperature ? 1 : 0, l.a21_zero ? 1 : 0};
    });
}

eitn_status eitn_spectrum(const eitn_system* sys, eitn_route route, const double* delta, size_t n,
                          eitn_spectrum_row* rows) {
    return guarded([&] {
        require(sys != nullptr && (n == 0 || (delta && rows)), "null argument");
        SpectrumOptions opt;
        opt.route = route == EITN_ROUTE_OFFDIAGONAL ? DiffusionRoute::OffDiagonal
                                                    : DiffusionRoute::General;
        const NoiseSpectrumResult r = compute_noise_spectrum(
            sys->config.system, sys->model, sys->state, std::span<const double>(delta, n), opt);
        for (size_t i = 0; i < n; ++i) {
            const NoiseSpectrumRow& x = r.rows[i];
            rows[i] = {x.delta,
                       x.s_analytic,
                       x.s_assembled,
                       x.chi_aH_imag,
                       x.commutator_residual,
                       x.ordering_residual,
                       x.fdt_violation,
                       x.log10_fdt_violation,
                       x.gain ? 1 : 0,
                       r.spectra.normally_ordered[i],
                       r.spectra.anti_normally_ordered[i],
                       r.spectra.symmetrized[i],
                       r.spectra.antisymmetric[i]};
        }
    });
}

eitn_status eitn_verify_fdt(const eitn_spectrum_row* rows, size_t n, double tolerance,
                            eitn_fdt_report* out) {
    return guarded([&] {
        require(out != nullptr && (n == 0 || rows != nullptr), "null argument");
        NoiseSpectrumResult r;
        r.rows.resize(n);
        for (size_t i = 0; i < n; ++i) {
            NoiseSpectrumRow& x = r.rows[i];
            x.delta = rows[i].delta;
            x.s_analytic = rows[i].s_analytic;
            x.s_assembled = rows[i].s_assembled;
            x.chi_aH_imag = rows[i].chi_aH_imag;
            x.commutator_residual = rows[i].commutator_residual;
            x.ordering_residual = rows[i].ordering_residual;
            x.fdt_violation = rows[i].fdt_violation;
            x.log10_fdt_violation = rows[i].log10_fdt_violation;
            x.gain = rows[i].gain != 0;
        }
        const FdtReport rep = verify_modified_fdt(r, tolerance);
        *out = {rep.max_s_deviation,         rep.max_s_relative,    rep.max_commutator_residual,
                rep.max_ordering_residual,   rep.min_fdt_violation, rep.max_fdt_violation,
                rep.gain_rows,               rep.passed ? 1 : 0};
    });
}

eitn_status eitn_drift_matrix(const eitn_system* sys, double delta_p, double* re4, double* im4) {
    return guarded([&] {
        require(sys != nullptr && re4 != nullptr && im4 != nullptr, "null argument");
        const Eigen::Matrix2cd m = drift_matrix(sys->config.system, sys->model, delta_p);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                re4[i * 2 + j] = m(i, j).real();
                im4[i * 2 + j] = m(i, j).imag();
            }
        }
    });
}

eitn_status eitn_noise_cholesky(const eitn_system* sys, double* l16) {
    return guarded([&] {
        require(sys != nullptr && l16 != nullptr, "null argument");
        const Eigen::Matrix4d l = noise_cholesky(diffusion_of(sys, EITN_ROUTE_GENERAL));
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) l16[i * 4 + j] = l(i, j);
    });
}

eitn_status eitn_simulate(const eitn_system* sys, const eitn_sim_config* config,
                          eitn_sim_spectrum** out) {
    return guarded([&] {
        require(sys != nullptr && config != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        const DiffusionMatrix d = diffusion_of(sys, EITN_ROUTE_GENERAL);
        auto* sim = new eitn_sim_spectrum;
        try {
            sim->spectrum = simulate_ensemble(sys->config.system, sys->model, sys->state, d,
                                              from_c(*config));
        } catch (...) {
            delete sim;
            throw;
        }
        *out = sim;
    });
}

eitn_status eitn_sim_info_get(const eitn_sim_spectrum* sim, eitn_sim_info* out) {
    return guarded([&] {
        require(sim != nullptr && out != nullptr, "null argument");
        const SimSpectrum& s = sim->spectrum;
        *out = {s.nu_grid.size(),         s.burn_in_steps,     s.segment_length,
                s.segments_per_trajectory, s.band_power_mean,  s.band_power_stderr,
                s.system_hash};
    });
}

eitn_status eitn_sim_compare(const eitn_system* sys, const eitn_sim_spectrum* sim,
                             eitn_sim_row* rows, eitn_sim_summary* summary) {
    return guarded([&] {
        require(sys != nullptr && sim != nullptr && rows != nullptr, "null argument");
        const SimComparison c =
            compare_with_analytic(sys->config.system, sys->model, sys->state, sim->spectrum);
        for (size_t j = 0; j < c.nu_grid.size(); ++j) {
            rows[j] = {c.nu_grid[j],  c.psd_mean[j],           c.psd_stderr[j], c.expected[j],
                       c.analytic[j], c.relative_deviation[j], c.z_score[j]};
        }
        if (summary) {
            *summary = {c.max_relative_deviation, c.max_raw_relative_deviation,
                        c.band_power_expected,    c.band_power_z,
                        c.fraction_within_3sigma, c.band_bins};
        }
    });
}

void eitn_sim_free(eitn_sim_spectrum* sim) { delete sim; }

}  // extern "C"
