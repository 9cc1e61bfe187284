#include "generators.hpp"

#include "error.hpp"
#include "langevin_sim.hpp"

#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

using namespace eitn_test;

namespace {

Medium two_level() {
    LambdaSystem s;
    s.omega31 = 1e5;
    s.omega21 = 10.0;
    s.a31 = 1.0;
    s.a32 = 1.0;
    s.a21 = 1e-3;  // keeps the ground state unique at T = 0
    s.gamma31 = 1.0;
    s.gamma32 = 1.0;
    s.gamma21 = 1e-2;
    s.temperature = Kelvin{0.0};
    return make_medium(s);
}

SimulationConfig small_config() {
    SimulationConfig c;
    c.dt = 0.02;
    c.n_steps = 1u << 15;
    c.n_traj = 130;
    c.seed = 99;
    c.welch.segment_length = 4096;
    c.workers = 1;
    return c;
}

// Stationary covariance of the Euler-Maruyama recursion x' = A x + sqrt(dt) L z.
Eigen::Matrix4d euler_stationary(const Eigen::Matrix4d& m, const Eigen::Matrix4d& c, double dt) {
    const Eigen::Matrix4d a = Eigen::Matrix4d::Identity() + m * dt;
    const Eigen::Matrix<double, 16, 16> k =
        Eigen::Matrix<double, 16, 16>::Identity() - Eigen::kroneckerProduct(a, a).eval();
    const Eigen::Matrix<double, 16, 1> rhs = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(c.data()) * dt;
    const Eigen::Matrix<double, 16, 1> v = k.partialPivLu().solve(rhs);
    return Eigen::Map<const Eigen::Matrix4d>(v.data());
}

}  // namespace

TEST_SUITE("langevin-sim") {

TEST_CASE("property: drift is stable when both coherences are damped") {
    Rng rng(601);
    for (int i = 0; i < 1000; ++i) {
        LambdaSystem s = random_system(rng);
        const RelaxationModel m = build_relaxation(s);
        if (m.gamma21() <= 0.0) continue;
        const Eigen::Vector2cd ev = drift_matrix(s, m, rng.uniform(-5.0, 5.0)).eigenvalues();
        CHECK(ev(0).real() < 0.0);
        CHECK(ev(1).real() < 0.0);
    }
}

TEST_CASE("property: inverting the drift reproduces the transfer functions") {
    Rng rng(602);
    for (int i = 0; i < 200; ++i) {
        const Medium md = make_medium(random_system(rng));
        const double delta_p = rng.uniform(-2.0, 2.0);
        std::vector<double> nu(20);
        for (double& v : nu) v = rng.uniform(-10.0, 10.0);
        const ResponseKernel k = transfer_functions(md.system, md.model, md.state, delta_p, nu);
        const Eigen::Matrix2cd m = drift_matrix(md.system, md.model, delta_p);
        for (std::size_t j = 0; j < nu.size(); ++j) {
            // -i nu s = M s + f
            const Eigen::Matrix2cd g =
                (-cplx(0.0, nu[j]) * Eigen::Matrix2cd::Identity() - m).inverse();
            CHECK(std::abs(g(0, 0) - k.h31[j]) <= 1e-12 * std::abs(k.h31[j]));
            CHECK(std::abs(g(0, 1) - k.h21[j]) <= 1e-12 * std::abs(k.h21[j]) + 1e-300);
        }
    }
}

TEST_CASE("real form of the drift matches complex multiplication") {
    Rng rng(603);
    const Medium md = make_medium(random_system(rng, {.drive = DriveStrength::Strong}));
    const Eigen::Matrix2cd m = drift_matrix(md.system, md.model, 0.4);
    const Eigen::Matrix4d r = real_drift(m);
    const Eigen::Vector2cd z(cplx(0.3, -1.1), cplx(2.0, 0.5));
    const Eigen::Vector2cd mz = m * z;
    const Eigen::Vector4d rz = r * Eigen::Vector4d(z(0).real(), z(0).imag(), z(1).real(), z(1).imag());
    CHECK(rz(0) == doctest::Approx(mz(0).real()));
    CHECK(rz(1) == doctest::Approx(mz(0).imag()));
    CHECK(rz(2) == doctest::Approx(mz(1).real()));
    CHECK(rz(3) == doctest::Approx(mz(1).imag()));
}

TEST_CASE("property: noise factor reconstructs the covariance") {
    Rng rng(604);
    for (int i = 0; i < 1000; ++i) {
        const Medium md = make_medium(random_system(rng));
        const DiffusionMatrix d = diffusion_general(md.system, md.model, md.state);
        const Eigen::Matrix4d c = symmetrized_force_covariance(d);
        const Eigen::Matrix4d l = noise_cholesky(d);
        CHECK((l * l.transpose() - c).cwiseAbs().maxCoeff() <= 1e-12 * c.cwiseAbs().maxCoeff());
        CHECK(l.isLowerTriangular());
        // total variance of f31 is the symmetrized <f31 f13> correlator
        const DiffusionEntries g = symmetrized_covariance(d);
        CHECK(std::abs(c(0, 0) + c(1, 1) - g(0, 0).real()) <= 1e-12 * std::abs(g(0, 0)));
    }
}

TEST_CASE("semidefinite Cholesky") {
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    c(0, 0) = 4.0;
    c(2, 2) = 1.0;
    c(0, 2) = c(2, 0) = 1.0;
    const Eigen::Matrix4d l = semidefinite_cholesky(c);
    CHECK((l * l.transpose() - c).norm() < 1e-15);
    CHECK(l.col(1).isZero());

    c(1, 1) = -1e-3;
    try {
        semidefinite_cholesky(c);
        FAIL("expected NotPositiveSemidefinite");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveSemidefinite);
    }
}

TEST_CASE("Lyapunov solve") {
    Rng rng(605);
    const Medium md = make_medium(random_system(rng, {.drive = DriveStrength::Strong}));
    const Eigen::Matrix4d m = real_drift(drift_matrix(md.system, md.model, 0.0));
    const Eigen::Matrix4d c = symmetrized_force_covariance(diffusion_general(md.system, md.model, md.state));
    const Eigen::Matrix4d s = stationary_covariance(m, c);
    CHECK((m * s + s * m.transpose() + c).cwiseAbs().maxCoeff() <= 1e-12 * c.cwiseAbs().maxCoeff());
}

TEST_CASE("guards") {
    const Medium md = two_level();
    SimulationConfig c = small_config();
    CHECK_NOTHROW(check_simulation_config(md.system, md.model, c));
    c.dt = 0.06;
    CHECK_THROWS_AS(check_simulation_config(md.system, md.model, c), Error);
    c = small_config();
    c.n_traj = 1;
    CHECK_THROWS_AS(check_simulation_config(md.system, md.model, c), Error);
    c = small_config();
    c.n_steps = 5000;  // burn-in alone needs 10 / (0.01 * 0.02) steps
    const DiffusionMatrix d = diffusion_general(md.system, md.model, md.state);
    CHECK_THROWS_AS(simulate_ensemble(md.system, md.model, md.state, d, c), Error);
    CHECK(integrator_from_name(integrator_name(Integrator::EulerMaruyama)) == Integrator::EulerMaruyama);
    CHECK_THROWS(integrator_from_name("rk4"));
}

TEST_CASE("burn-in covers ten of the slowest decay times") {
    const Medium md = two_level();
    SimulationConfig c = small_config();
    c.burn_in = 0.0;
    CHECK(burn_in_steps(md.system, md.model, c) == 50000);
    c.burn_in = 0.9;
    c.n_steps = 1u << 17;
    CHECK(burn_in_steps(md.system, md.model, c) == static_cast<std::size_t>(std::ceil(0.9 * c.n_steps)));
}

TEST_CASE("ensemble spectrum does not depend on the worker count") {
    Medium md = two_level();
    md.system.gamma21 = 0.5;
    md = make_medium(md.system);
    const DiffusionMatrix d = diffusion_general(md.system, md.model, md.state);
    SimulationConfig c = small_config();
    const SimSpectrum a = simulate_ensemble(md.system, md.model, md.state, d, c);
    c.workers = 3;
    const SimSpectrum b = simulate_ensemble(md.system, md.model, md.state, d, c);
    CHECK(a.psd_mean == b.psd_mean);
    CHECK(a.psd_stderr == b.psd_stderr);
    CHECK(a.band_power_mean == b.band_power_mean);
    c.seed += 1;
    const SimSpectrum other = simulate_ensemble(md.system, md.model, md.state, d, c);
    CHECK(other.psd_mean != a.psd_mean);
}

TEST_CASE("undriven ensemble matches the expected estimator output") {
    Medium md = two_level();
    md.system.gamma21 = 0.5;
    md = make_medium(md.system);
    const DiffusionMatrix d = diffusion_general(md.system, md.model, md.state);
    SimulationConfig c = small_config();
    c.n_traj = 64;
    const SimSpectrum sim = simulate_ensemble(md.system, md.model, md.state, d, c);
    const SimComparison cmp = compare_with_analytic(md.system, md.model, md.state, sim);
    CHECK(cmp.band_bins > 100);
    CHECK(cmp.fraction_within_3sigma >= 0.97);
    CHECK(std::abs(cmp.band_power_z) < 4.0);
}

TEST_CASE("Euler-Maruyama variance converges at first order") {
    Rng rng(606);
    for (int i = 0; i < 20; ++i) {
        const Medium md = make_medium(random_system(rng, {.drive = DriveStrength::Strong}));
        const Eigen::Matrix4d m = real_drift(drift_matrix(md.system, md.model, 0.0));
        const Eigen::Matrix4d c = symmetrized_force_covariance(diffusion_general(md.system, md.model, md.state));
        const double exact = stationary_covariance(m, c).trace();
        const double g31 = md.model.gamma31();
        const double fast = std::max(g31, std::abs(md.system.drive_rabi));
        double previous = std::numeric_limits<double>::infinity();
        for (double k : {0.05, 0.025, 0.0125}) {
            const double err = std::abs(euler_stationary(m, c, k / fast).trace() - exact) / exact;
            CHECK(err < previous);
            if (std::isfinite(previous)) CHECK(err / previous == doctest::Approx(0.5).epsilon(0.15));
            previous = err;
        }
    }
}

}  // TEST_SUITE
