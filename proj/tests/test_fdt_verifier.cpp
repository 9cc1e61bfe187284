#include "generators.hpp"

#include "error.hpp"
#include "fdt_verifier.hpp"

#include <doctest.h>

#include <numeric>
#include <vector>

using namespace eitn_test;

namespace {

std::vector<double> linear_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

TEST_SUITE("fdt-verifier") {

TEST_CASE("commutator residual guards the zero of chi") {
    CHECK(commutator_residual(1.0, 1.0, 3.0, 2.0) == 0.0);
    CHECK(commutator_residual(1.1, 1.0, 3.0, 2.0) == doctest::Approx(0.1));
    // reference 0 falls back to the size of the ordered spectra
    CHECK(commutator_residual(1e-20, 0.0, 1.0, 1.0) == doctest::Approx(1e-20 / (2.0 * 2.220446049250313e-16)));
}

TEST_CASE("assembled spectra reject foreign kernels") {
    Rng rng(501);
    const Medium a = make_medium(random_system(rng));
    const Medium b = make_medium(random_system(rng));
    const std::vector<double> nu{0.0, 1.0};
    const DiffusionMatrix d = diffusion_general(a.system, a.model, a.state);
    const ResponseKernel k = transfer_functions(b.system, b.model, b.state, 0.0, nu);
    try {
        assemble_spectra(d, k);
        FAIL("expected ProvenanceMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ProvenanceMismatch);
    }
}

TEST_CASE("only the sum of probe detuning and offset matters") {
    Rng rng(502);
    const Medium m = make_medium(random_system(rng, {.drive = DriveStrength::Strong}));
    const DiffusionMatrix d = diffusion_general(m.system, m.model, m.state);
    const std::vector<double> nu0{0.3, 1.7};
    const std::vector<double> nu1{-0.7, 0.7};
    const AssembledSpectra a = assemble_spectra(d, transfer_functions(m.system, m.model, m.state, 0.0, nu0));
    const AssembledSpectra b = assemble_spectra(d, transfer_functions(m.system, m.model, m.state, 1.0, nu1));
    for (int i = 0; i < 2; ++i) {
        CHECK(rel_err(b.symmetrized[i], a.symmetrized[i]) < 1e-12);
        CHECK(rel_err(b.antisymmetric[i], a.antisymmetric[i]) < 1e-12);
    }
}

TEST_CASE("symmetrized over antisymmetric is S + 1/2") {
    Rng rng(503);
    for (int i = 0; i < 50; ++i) {
        const Medium m = make_medium(random_system(rng));
        const auto grid = linear_grid(-5.0, 5.0, 21);
        const NoiseSpectrumResult r = compute_noise_spectrum(m.system, m.model, m.state, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (r.rows[j].gain) continue;
            const double ratio = r.spectra.symmetrized[j] / r.spectra.antisymmetric[j];
            CHECK(std::abs(ratio - (r.rows[j].s_analytic + 0.5)) <= 1e-9 * (r.rows[j].s_analytic + 1.0));
        }
    }
}

TEST_CASE("undriven medium recovers the standard relation") {
    Rng rng(504);
    for (int i = 0; i < 50; ++i) {
        const Medium m = make_medium(random_system(rng, {.drive = DriveStrength::Off}));
        const NoiseSpectrumResult r =
            compute_noise_spectrum(m.system, m.model, m.state, linear_grid(-10.0, 10.0, 200));
        const double n31 = thermal_state(m.system).n31;
        for (const NoiseSpectrumRow& row : r.rows) {
            CHECK_FALSE(row.gain);
            if (n31 < 1e-250) continue;
            CHECK(rel_err(row.s_assembled, n31) < 1e-9);
            CHECK(std::abs(row.fdt_violation - 1.0) < 1e-9);
            CHECK(std::abs(row.log10_fdt_violation) < 1e-9);
        }
    }
}

TEST_CASE("both diffusion routes give the same spectrum") {
    Rng rng(505);
    for (int i = 0; i < 50; ++i) {
        const Medium m = make_medium(random_system(rng));
        const auto grid = linear_grid(-10.0, 10.0, 41);
        const auto g = compute_noise_spectrum(m.system, m.model, m.state, grid, {DiffusionRoute::General});
        const auto o = compute_noise_spectrum(m.system, m.model, m.state, grid, {DiffusionRoute::OffDiagonal});
        for (std::size_t j = 0; j < grid.size(); ++j) {
            CHECK(std::abs(g.spectra.symmetrized[j] - o.spectra.symmetrized[j]) <=
                  1e-12 * std::abs(g.spectra.symmetrized[j]) + 1e-300);
        }
    }
}

TEST_CASE("report aggregates rows and flags gain") {
    NoiseSpectrumResult r;
    NoiseSpectrumRow ok;
    ok.s_analytic = 1.0;
    ok.s_assembled = 1.0 + 1e-12;
    ok.fdt_violation = 3.0;
    NoiseSpectrumRow gain;
    gain.gain = true;
    gain.s_analytic = std::numeric_limits<double>::quiet_NaN();
    gain.s_assembled = -2.0;
    gain.fdt_violation = -5.0;
    r.rows = {ok, gain};
    FdtReport rep = verify_modified_fdt(r, 1e-9);
    CHECK(rep.passed);
    CHECK(rep.gain_rows == 1);
    CHECK(rep.max_s_relative == doctest::Approx(1e-12).epsilon(1e-3));
    r.rows[0].commutator_residual = 1e-6;
    rep = verify_modified_fdt(r, 1e-9);
    CHECK_FALSE(rep.passed);
}

TEST_CASE("property: commutator identity on random media") {
    Rng rng(506);
    const auto grid = linear_grid(-10.0, 10.0, 200);
    for (int i = 0; i < 300; ++i) {
        const Medium m = make_medium(random_system(rng));
        const NoiseSpectrumResult r = compute_noise_spectrum(m.system, m.model, m.state, grid);
        const FdtReport rep = verify_modified_fdt(r);
        CHECK(rep.max_commutator_residual < 1e-10);
    }
}

TEST_CASE("property: ordering consistency") {
    Rng rng(507);
    const auto grid = linear_grid(-10.0, 10.0, 50);
    for (int i = 0; i < 300; ++i) {
        const Medium m = make_medium(random_system(rng));
        const NoiseSpectrumResult r = compute_noise_spectrum(m.system, m.model, m.state, grid);
        const AssembledSpectra& sp = r.spectra;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double lhs = sp.symmetrized[j] - sp.normally_ordered[j];
            const double scale = std::abs(sp.symmetrized[j]) + std::abs(sp.antisymmetric[j]);
            CHECK(std::abs(lhs - 0.5 * sp.antisymmetric[j]) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("property: S assembled agrees with S analytic and is non-negative where absorbing") {
    Rng rng(508);
    const auto grid = linear_grid(-10.0, 10.0, 200);
    for (int i = 0; i < 300; ++i) {
        const Medium m = make_medium(random_system(rng));
        const NoiseSpectrumResult r = compute_noise_spectrum(m.system, m.model, m.state, grid);
        for (const NoiseSpectrumRow& row : r.rows) {
            if (row.gain) {
                CHECK(std::isnan(row.s_analytic));
                continue;
            }
            CHECK(row.s_assembled >= 0.0);
            CHECK(std::abs(row.s_assembled - row.s_analytic) <= 1e-9 * row.s_analytic + 1e-300);
        }
    }
}

}  // TEST_SUITE
