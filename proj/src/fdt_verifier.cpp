#include "fdt_verifier.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace eitnoise {

AssembledSpectra assemble_spectra(const DiffusionMatrix& d, const ResponseKernel& k) {
    if (d.provenance != k.provenance) {
        throw Error(ErrorCode::ProvenanceMismatch,
                    "diffusion matrix and response kernel come from different media");
    }
    const std::size_t n = k.nu_grid.size();
    AssembledSpectra s;
    s.nu_grid = k.nu_grid;
    s.delta_p = k.delta_p;
    s.provenance = k.provenance;
    s.normally_ordered.resize(n);
    s.anti_normally_ordered.resize(n);
    s.symmetrized.resize(n);
    s.antisymmetric.resize(n);

    // sigma31 = H31 f31 + H21 f21 and sigma13 is its adjoint.
    const std::array<Force, 2> forces = {Force::F31, Force::F21};
    const double norm = k.dipole_scale / (2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < n; ++i) {
        const std::array<cplx, 2> h = {k.h31[i], k.h21[i]};
        cplx normal{}, anti{};
        for (int a = 0; a < 2; ++a) {
            const Force fa = adjoint(forces[a]);
            for (int b = 0; b < 2; ++b) {
                const cplx w = std::conj(h[a]) * h[b];
                normal += w * d(fa, forces[b]);
                anti += w * d(forces[b], fa);
            }
        }
        s.normally_ordered[i] = norm * normal.real();
        s.anti_normally_ordered[i] = norm * anti.real();
        s.symmetrized[i] = 0.5 * (s.normally_ordered[i] + s.anti_normally_ordered[i]);
        s.antisymmetric[i] = s.anti_normally_ordered[i] - s.normally_ordered[i];
    }
    return s;
}

double commutator_residual(double antisymmetric, double reference, double anti_normal,
                           double normal) {
    const double scale = std::max(
        std::abs(reference),
        std::numeric_limits<double>::epsilon() * (std::abs(anti_normal) + std::abs(normal)));
    if (scale == 0.0) return antisymmetric == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(antisymmetric - reference) / scale;
}

NoiseSpectrumResult compute_noise_spectrum(const LambdaSystem& system,
                                           const RelaxationModel& model,
                                           const SteadyState& state,
                                           std::span<const double> delta_grid,
                                           const SpectrumOptions& options) {
    const DiffusionMatrix d = options.route == DiffusionRoute::General
                                  ? diffusion_general(system, model, state)
                                  : diffusion_offdiagonal(system, model, state);
    // Only Delta_p + nu matters, so the grid is carried entirely by nu.
    const ResponseKernel k = transfer_functions(system, model, state, 0.0, delta_grid);

    NoiseSpectrumResult out;
    out.spectra = assemble_spectra(d, k);
    out.provenance = k.provenance;
    const ThermalState th = thermal_state(system);
    out.log_n31 = th.log_n31;

    const AssembledSpectra& sp = out.spectra;
    out.rows.resize(delta_grid.size());
    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        NoiseSpectrumRow& r = out.rows[i];
        r.delta = delta_grid[i];
        r.chi_aH_imag = k.chi_aH[i].imag();
        const double reference = r.chi_aH_imag / std::numbers::pi;
        const double normal = sp.normally_ordered[i];
        const double anti = sp.anti_normally_ordered[i];

        r.commutator_residual = commutator_residual(sp.antisymmetric[i], reference, anti, normal);
        const double sym_scale = std::max(std::abs(sp.symmetrized[i]),
                                          std::numeric_limits<double>::min());
        r.ordering_residual =
            std::abs(sp.symmetrized[i] - normal - 0.5 * sp.antisymmetric[i]) / sym_scale;

        r.s_assembled = normal / sp.antisymmetric[i];
        const auto s = try_noise_factor_S(system, model, state, r.delta);
        r.gain = !s.has_value();
        r.s_analytic = s.value_or(std::numeric_limits<double>::quiet_NaN());

        const double s_used = r.gain ? r.s_assembled : r.s_analytic;
        r.fdt_violation = s_used / th.n31;
        r.log10_fdt_violation = (std::log(s_used) - th.log_n31) / std::numbers::ln10;
        if (std::isnan(r.fdt_violation) && s_used == 0.0 && th.n31 == 0.0) {
            r.log10_fdt_violation = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return out;
}

FdtReport verify_modified_fdt(const NoiseSpectrumResult& result, double tolerance) {
    FdtReport rep;
    rep.min_fdt_violation = std::numeric_limits<double>::infinity();
    rep.max_fdt_violation = -std::numeric_limits<double>::infinity();
    for (const NoiseSpectrumRow& r : result.rows) {
        rep.max_commutator_residual = std::max(rep.max_commutator_residual, r.commutator_residual);
        rep.max_ordering_residual = std::max(rep.max_ordering_residual, r.ordering_residual);
        if (r.gain) {
            ++rep.gain_rows;
            continue;
        }
        const double dev = std::abs(r.s_assembled - r.s_analytic);
        rep.max_s_deviation = std::max(rep.max_s_deviation, dev / (r.s_analytic + 1.0));
        rep.max_s_relative = std::max(rep.max_s_relative,
                                      r.s_analytic == 0.0 ? dev : dev / std::abs(r.s_analytic));
        if (!std::isnan(r.fdt_violation)) {
            rep.min_fdt_violation = std::min(rep.min_fdt_violation, r.fdt_violation);
            rep.max_fdt_violation = std::max(rep.max_fdt_violation, r.fdt_violation);
        }
    }
    rep.passed = rep.max_s_deviation < tolerance && rep.max_commutator_residual < tolerance;
    return rep;
}

}  // namespace eitnoise
