#include "langevin_sim.hpp"

#include "error.hpp"
#include "philox.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

namespace eitnoise {

Eigen::Matrix2cd drift_matrix(const LambdaSystem& system, const RelaxationModel& model,
                              double delta_p) {
    const cplx i1(0.0, 1.0);
    Eigen::Matrix2cd m;
    m(0, 0) = -cplx(model.gamma31(), -delta_p);
    m(0, 1) = i1 * system.drive_rabi;
    m(1, 0) = i1 * std::conj(system.drive_rabi);
    m(1, 1) = -cplx(model.gamma21(), -delta_p);
    return m;
}

Eigen::Matrix4d real_drift(const Eigen::Matrix2cd& m) {
    Eigen::Matrix4d r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double a = m(i, j).real(), b = m(i, j).imag();
            r.block<2, 2>(2 * i, 2 * j) << a, -b, b, a;
        }
    }
    return r;
}

Eigen::Matrix4d symmetrized_force_covariance(const DiffusionMatrix& d) {
    const std::array<Force, 2> f = {Force::F31, Force::F21};
    Eigen::Matrix4d c;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Force fj_adj = adjoint(f[j]);
            const cplx sigma = 0.5 * (d(f[i], fj_adj) + d(fj_adj, f[i]));  // E[f_i f_j^*]
            const cplx pseudo = 0.5 * (d(f[i], f[j]) + d(f[j], f[i]));    // E[f_i f_j]
            c(2 * i, 2 * j) = 0.5 * (sigma + pseudo).real();
            c(2 * i + 1, 2 * j + 1) = 0.5 * (sigma - pseudo).real();
            c(2 * i, 2 * j + 1) = 0.5 * (pseudo - sigma).imag();
            c(2 * i + 1, 2 * j) = 0.5 * (pseudo + sigma).imag();
        }
    }
    return c;
}

Eigen::Matrix4d semidefinite_cholesky(const Eigen::Matrix4d& c, double relative_tolerance) {
    const double scale = std::max(c.diagonal().cwiseAbs().maxCoeff(), 1e-300);
    const double tol = relative_tolerance * scale;
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw Error(ErrorCode::NotPositiveSemidefinite, "covariance is not symmetric");
    }
    Eigen::Matrix4d l = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 4; ++k) {
        double pivot = c(k, k) - l.row(k).head(k).squaredNorm();
        if (pivot < -tol) {
            throw Error(ErrorCode::NotPositiveSemidefinite,
                        "non-classical force covariance; time-domain check unavailable");
        }
        if (pivot <= tol) continue;
        l(k, k) = std::sqrt(pivot);
        for (int i = k + 1; i < 4; ++i) {
            l(i, k) = (c(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
        }
    }
    if ((l * l.transpose() - c).cwiseAbs().maxCoeff() > 1e3 * tol + 1e-14 * scale) {
        throw Error(ErrorCode::NotPositiveSemidefinite,
                    "non-classical force covariance; time-domain check unavailable");
    }
    return l;
}

Eigen::Matrix4d noise_cholesky(const DiffusionMatrix& d) {
    return semidefinite_cholesky(symmetrized_force_covariance(d));
}

Eigen::Matrix4d stationary_covariance(const Eigen::Matrix4d& m, const Eigen::Matrix4d& c) {
    const Eigen::Matrix4d id = Eigen::Matrix4d::Identity();
    const Eigen::Matrix<double, 16, 16> k =
        Eigen::kroneckerProduct(id, m) + Eigen::kroneckerProduct(m, id);
    Eigen::Matrix<double, 16, 1> rhs = -Eigen::Map<const Eigen::Matrix<double, 16, 1>>(c.data());
    const Eigen::Matrix<double, 16, 1> v = k.fullPivLu().solve(rhs);
    Eigen::Matrix4d s = Eigen::Map<const Eigen::Matrix4d>(v.data());
    return 0.5 * (s + s.transpose());
}

std::string integrator_name(Integrator integrator) {
    return integrator == Integrator::Exact ? "exact" : "euler-maruyama";
}

Integrator integrator_from_name(const std::string& name) {
    if (name == "exact") return Integrator::Exact;
    if (name == "euler" || name == "euler-maruyama") return Integrator::EulerMaruyama;
    throw Error(ErrorCode::Config, "simulation.integrator: unknown integrator '" + name + "'");
}

void check_simulation_config(const LambdaSystem& system, const RelaxationModel& model,
                             const SimulationConfig& config) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::GuardViolated, what); };
    if (!(config.dt > 0.0) || !std::isfinite(config.dt)) fail("simulation.dt must be positive");
    const double fastest =
        std::max({model.gamma31(), std::abs(system.drive_rabi), std::abs(config.delta_p)});
    if (config.dt * fastest > kDtGuard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "simulation.dt = " << config.dt << " violates dt * max(gamma31, |Omega_d|, |Delta_p|) <= "
           << kDtGuard;
        fail(os.str());
    }
    if (config.n_traj < 2) fail("simulation.n_traj must be >= 2");
    if (config.n_steps < 16) fail("simulation.n_steps too small");
    if (!(config.burn_in >= 0.0 && config.burn_in < 1.0)) {
        fail("simulation.burn_in must lie in [0, 1)");
    }
    if (!(config.band_halfwidth > 0.0)) fail("simulation.band_halfwidth must be positive");
}

std::size_t burn_in_steps(const LambdaSystem& system, const RelaxationModel& model,
                          const SimulationConfig& config) {
    const Eigen::Matrix2cd m = drift_matrix(system, model, config.delta_p);
    const Eigen::Vector2cd ev = m.eigenvalues();
    const double slowest = std::min(std::abs(ev(0).real()), std::abs(ev(1).real()));
    const double from_fraction = std::ceil(config.burn_in * double(config.n_steps));
    const double from_decay = std::ceil(10.0 / (slowest * config.dt));
    return static_cast<std::size_t>(std::max(from_fraction, from_decay));
}

namespace {

struct BlockResult {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    double band_sum = 0.0;
    double band_sum_sq = 0.0;
};

struct Stepper {
    Eigen::Matrix4d a;      // propagator (exact) or I + M dt
    Eigen::Matrix4d noise;  // factor applied to a standard normal vector
    double blow_up = 0.0;   // squared norm that signals divergence
};

Stepper make_stepper(const Eigen::Matrix4d& m, const Eigen::Matrix4d& c, double dt,
                     Integrator integrator) {
    const Eigen::Matrix4d sigma = stationary_covariance(m, c);
    Stepper s;
    if (integrator == Integrator::Exact) {
        s.a = (m * dt).exp();
        Eigen::Matrix4d q = sigma - s.a * sigma * s.a.transpose();
        q = 0.5 * (q + q.transpose());
        s.noise = semidefinite_cholesky(q, 1e-9);
    } else {
        s.a = Eigen::Matrix4d::Identity() + m * dt;
        s.noise = semidefinite_cholesky(c) * std::sqrt(dt);
    }
    s.blow_up = 1e8 * std::max(sigma.trace(), 1e-300);
    return s;
}

}  // namespace

SimSpectrum simulate_ensemble(const LambdaSystem& system, const RelaxationModel& model,
                              const SteadyState& state, const DiffusionMatrix& d,
                              const SimulationConfig& config) {
    check_simulation_config(system, model, config);
    const std::uint64_t hash = medium_fingerprint(system, model, state);
    if (hash != d.provenance) {
        throw Error(ErrorCode::ProvenanceMismatch, "diffusion matrix belongs to another medium");
    }

    const std::size_t seg_len =
        config.welch.segment_length ? config.welch.segment_length : config.n_steps / 8;
    const std::size_t burn = burn_in_steps(system, model, config);
    if (burn + seg_len > config.n_steps) {
        std::ostringstream os;
        os << "simulation.n_steps = " << config.n_steps << " leaves no room for " << burn
           << " burn-in steps plus one Welch segment of " << seg_len;
        throw Error(ErrorCode::GuardViolated, os.str());
    }
    const std::size_t n_record = config.n_steps - burn;

    const Eigen::Matrix4d m = real_drift(drift_matrix(system, model, config.delta_p));
    const Stepper stepper = make_stepper(m, symmetrized_force_covariance(d), config.dt,
                                         config.integrator);
    const WelchEstimator welch(seg_len, config.welch.overlap, config.welch.window, config.dt);
    const std::vector<double> nu = welch.frequencies();
    const double dnu = 2.0 * std::numbers::pi / (double(seg_len) * config.dt);
    const double amplitude = std::sqrt(system.dipole_scale);

    const std::size_t n_blocks = (config.n_traj + kBlockSize - 1) / kBlockSize;
    std::vector<BlockResult> blocks(n_blocks);
    std::vector<std::exception_ptr> errors(n_blocks);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        std::vector<cplx> series(n_record);
        std::vector<double> psd(seg_len);
        for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
            try {
                BlockResult& out = blocks[b];
                out.sum.assign(seg_len, 0.0);
                out.sum_sq.assign(seg_len, 0.0);
                const std::size_t first = b * kBlockSize;
                const std::size_t last = std::min(config.n_traj, first + kBlockSize);
                for (std::size_t t = first; t < last; ++t) {
                    const GaussianStream rng(config.seed, t);
                    Eigen::Vector4d x = Eigen::Vector4d::Zero();
                    for (std::size_t s = 0; s < config.n_steps; ++s) {
                        const std::array<double, 4> z = rng.normals(s);
                        x = stepper.a * x +
                            stepper.noise * Eigen::Map<const Eigen::Vector4d>(z.data());
                        if (s >= burn) series[s - burn] = amplitude * cplx(x(0), x(1));
                        if ((s & 1023u) == 0 && !(x.squaredNorm() < stepper.blow_up)) {
                            std::ostringstream os;
                            os << "trajectory " << t << " diverged at step " << s
                               << " with dt = " << config.dt;
                            throw Error(ErrorCode::Unstable, os.str());
                        }
                    }
                    welch.estimate(series.data(), n_record, psd.data());
                    double band = 0.0;
                    for (std::size_t j = 0; j < seg_len; ++j) {
                        out.sum[j] += psd[j];
                        out.sum_sq[j] += psd[j] * psd[j];
                        if (std::abs(nu[j]) <= config.band_halfwidth) band += psd[j] * dnu;
                    }
                    out.band_sum += band;
                    out.band_sum_sq += band * band;
                }
            } catch (...) {
                errors[b] = std::current_exception();
            }
        }
    };

    unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
    workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, n_blocks));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    SimSpectrum out;
    out.nu_grid = nu;
    out.config = config;
    out.system_hash = hash;
    out.burn_in_steps = burn;
    out.segment_length = seg_len;
    out.segments_per_trajectory = welch.segment_count(n_record);

    std::vector<double> sum(seg_len, 0.0), sum_sq(seg_len, 0.0);
    double band_sum = 0.0, band_sum_sq = 0.0;
    for (const BlockResult& b : blocks) {
        for (std::size_t j = 0; j < seg_len; ++j) {
            sum[j] += b.sum[j];
            sum_sq[j] += b.sum_sq[j];
        }
        band_sum += b.band_sum;
        band_sum_sq += b.band_sum_sq;
    }
    const double n = double(config.n_traj);
    auto stderr_of = [n](double s, double s2) {
        const double mean = s / n;
        const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
        return std::sqrt(var / n);
    };
    out.psd_mean.resize(seg_len);
    out.psd_stderr.resize(seg_len);
    for (std::size_t j = 0; j < seg_len; ++j) {
        out.psd_mean[j] = sum[j] / n;
        out.psd_stderr[j] = stderr_of(sum[j], sum_sq[j]);
    }
    out.band_power_mean = band_sum / n;
    out.band_power_stderr = stderr_of(band_sum, band_sum_sq);
    return out;
}

SimComparison compare_with_analytic(const LambdaSystem& system, const RelaxationModel& model,
                                    const SteadyState& state, const SimSpectrum& sim) {
    const SimulationConfig& cfg = sim.config;
    const DiffusionMatrix d = diffusion_general(system, model, state);
    auto symmetrized = [&](const std::vector<double>& nu, std::vector<double>& out) {
        const ResponseKernel k = transfer_functions(system, model, state, cfg.delta_p, nu);
        out = assemble_spectra(d, k).symmetrized;
    };

    SimComparison c;
    c.nu_grid = sim.nu_grid;
    c.psd_mean = sim.psd_mean;
    c.psd_stderr = sim.psd_stderr;
    symmetrized(sim.nu_grid, c.analytic);

    const std::vector<double> window = make_window(cfg.welch.window, sim.segment_length);
    const std::vector<cplx> autocov =
        autocovariance_from_spectrum(symmetrized, cfg.dt, sim.segment_length);
    c.expected = expected_periodogram(window, autocov, cfg.dt);

    const std::size_t n = c.nu_grid.size();
    const double dnu = 2.0 * std::numbers::pi / (double(sim.segment_length) * cfg.dt);
    c.relative_deviation.resize(n);
    c.z_score.resize(n);
    std::size_t within = 0;
    for (std::size_t j = 0; j < n; ++j) {
        c.relative_deviation[j] = c.psd_mean[j] / c.expected[j] - 1.0;
        c.z_score[j] = (c.psd_mean[j] - c.expected[j]) / c.psd_stderr[j];
        if (std::abs(c.nu_grid[j]) > cfg.band_halfwidth) continue;
        ++c.band_bins;
        c.max_relative_deviation =
            std::max(c.max_relative_deviation, std::abs(c.relative_deviation[j]));
        c.max_raw_relative_deviation =
            std::max(c.max_raw_relative_deviation, std::abs(c.psd_mean[j] / c.analytic[j] - 1.0));
        c.band_power_expected += c.expected[j] * dnu;
        if (std::abs(c.z_score[j]) <= 3.0) ++within;
    }
    c.fraction_within_3sigma = c.band_bins ? double(within) / double(c.band_bins) : 0.0;
    c.band_power_z = (sim.band_power_mean - c.band_power_expected) / sim.band_power_stderr;
    return c;
}

}  // namespace eitnoise
