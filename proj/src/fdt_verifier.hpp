#pragma once

// Frequency-domain assembly of the polarization noise spectra from the
// diffusion matrix and the transfer functions, and the checks built on them.
//
// Spectra are the coefficients of delta(w - w') in units hbar = 1, scaled by
// dipole_scale, so the commutator identity reads A - N = (1/pi)(-i chi^aH).

#include "einstein_relations.hpp"
#include "response.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace eitnoise {

struct AssembledSpectra {
    std::vector<double> nu_grid;
    std::vector<double> normally_ordered;       // <dP^+ dP>
    std::vector<double> anti_normally_ordered;  // <dP dP^+>
    std::vector<double> symmetrized;
    std::vector<double> antisymmetric;  // anti-normal minus normal
    double delta_p = 0.0;
    std::uint64_t provenance = 0;
};

/// Throws Error(ProvenanceMismatch) if d and k describe different media.
AssembledSpectra assemble_spectra(const DiffusionMatrix& d, const ResponseKernel& k);

enum class DiffusionRoute { General, OffDiagonal };

struct SpectrumOptions {
    DiffusionRoute route = DiffusionRoute::General;
};

struct NoiseSpectrumRow {
    double delta = 0.0;
    double s_analytic = 0.0;  // NaN where the medium amplifies
    double s_assembled = 0.0;
    double chi_aH_imag = 0.0;
    double commutator_residual = 0.0;
    double ordering_residual = 0.0;
    double fdt_violation = 0.0;        // S / n_T(omega31), may overflow to inf
    double log10_fdt_violation = 0.0;  // finite where n_T underflows
    bool gain = false;
};

struct NoiseSpectrumResult {
    std::vector<NoiseSpectrumRow> rows;
    AssembledSpectra spectra;
    double log_n31 = 0.0;
    std::uint64_t provenance = 0;
};

NoiseSpectrumResult compute_noise_spectrum(const LambdaSystem& system,
                                           const RelaxationModel& model,
                                           const SteadyState& state,
                                           std::span<const double> delta_grid,
                                           const SpectrumOptions& options = {});

/// Relative commutator error, guarded against the zero of -i chi^aH.
double commutator_residual(double antisymmetric, double reference, double anti_normal,
                           double normal);

struct FdtReport {
    double max_s_deviation = 0.0;  // |S_asm - S_an| / (S_an + 1)
    double max_s_relative = 0.0;   // |S_asm / S_an - 1|
    double max_commutator_residual = 0.0;
    double max_ordering_residual = 0.0;
    double min_fdt_violation = 0.0;
    double max_fdt_violation = 0.0;
    std::size_t gain_rows = 0;
    bool passed = false;
};

FdtReport verify_modified_fdt(const NoiseSpectrumResult& result, double tolerance = 1e-9);

}  // namespace eitnoise
