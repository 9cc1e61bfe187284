// eitnoise command-line front end: steady, spectrum, sweep, simulate and
// dump-diffusion over the C API, writing CSV + JSON under out/<sub>/<run>/.

#include "eitnoise/eitnoise.h"
#include "records.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace eitn_cli;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotPsd = 3;

struct CliError {
    int exit_code;
    std::string message;
};

void check(eitn_status st, const std::string& context) {
    if (st == EITN_OK) return;
    int code = kExitFailure;
    if (st == EITN_ERR_CONFIG || st == EITN_ERR_INVALID_ARGUMENT || st == EITN_ERR_GUARD) {
        code = kExitConfig;
    } else if (st == EITN_ERR_NOT_PSD) {
        code = kExitNotPsd;
    }
    throw CliError{code, context + ": " + eitn_status_name(st) + ": " + eitn_last_error()};
}

struct SystemDeleter {
    void operator()(eitn_system* s) const { eitn_system_free(s); }
};
struct SimDeleter {
    void operator()(eitn_sim_spectrum* s) const { eitn_sim_free(s); }
};
using SystemPtr = std::unique_ptr<eitn_system, SystemDeleter>;
using SimPtr = std::unique_ptr<eitn_sim_spectrum, SimDeleter>;

struct Options {
    std::string config;
    std::string out = "out";
    std::string name;
    std::optional<std::uint64_t> seed;
    std::string grid;
    std::optional<std::size_t> n_traj;
    std::optional<double> dt;
    std::optional<double> tolerance;
    std::string axis;
    std::optional<unsigned> workers;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output root directory")->capture_default_str();
    sub->add_option("--name", o.name, "run directory name (default: UTC timestamp)");
    sub->add_option("--seed", o.seed, "master RNG seed");
    sub->add_option("--grid", o.grid, "grid min:max:n[:log]");
    sub->add_option("--n-traj", o.n_traj, "number of trajectories");
    sub->add_option("--dt", o.dt, "integration step");
    sub->add_option("--tolerance", o.tolerance, "verification tolerance");
    sub->add_option("--axis", o.axis, "sweep axis: drive, delta, temperature, gamma21, omega21");
    sub->add_option("--workers", o.workers, "worker threads (results do not depend on it)");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError{kExitConfig, "--config: cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path make_run_dir(const Options& o, const std::string& sub) {
    fs::path dir = fs::path(o.out) / sub / (o.name.empty() ? utc_timestamp() : o.name);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw CliError{kExitFailure, "cannot create " + dir.string() + ": " + ec.message()};
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw CliError{kExitFailure, "cannot write " + path.string()};
}

template <class F>
void write_csv(const fs::path& path, F&& body) {
    std::ofstream out(path, std::ios::binary);
    body(out);
    if (!out) throw CliError{kExitFailure, "cannot write " + path.string()};
}

json system_json(const eitn_system* sys) {
    char* text = nullptr;
    check(eitn_system_to_json(sys, &text), "config");
    json j = json::parse(text);
    eitn_string_free(text);
    return j;
}

json info_json(const eitn_system_info& i) {
    return {{"rate_unit", encode_number(i.rate_unit)},
            {"gamma31", encode_number(i.gamma31)},
            {"gamma21", encode_number(i.gamma21)},
            {"gamma32", encode_number(i.gamma32)},
            {"n21", encode_number(i.n21)},
            {"n31", encode_number(i.n31)},
            {"n32", encode_number(i.n32)},
            {"log_n31", encode_number(i.log_n31)},
            {"planck_consistent", i.planck_consistent != 0},
            {"fingerprint", i.fingerprint}};
}

void write_meta(const fs::path& dir, const std::string& sub, const Options& o,
                const eitn_system* sys, const json& extra) {
    eitn_system_info info{};
    check(eitn_system_info_get(sys, &info), "system");
    eitn_regime regime{};
    check(eitn_regime_report(sys, &regime), "regime");
    json meta = {{"tool", "eitnoise"},
                 {"version", eitn_version()},
                 {"subcommand", sub},
                 {"created_utc", utc_timestamp()},
                 {"config_path", o.config},
                 {"system", system_json(sys)},
                 {"system_info", info_json(info)},
                 {"regime", to_json(regime)}};
    if (o.seed) meta["seed"] = *o.seed;
    for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    write_text(dir / "meta.json", meta.dump(2) + "\n");
}

SystemPtr load_system(const Options& o) {
    const std::string text = read_file(o.config);
    eitn_system* raw = nullptr;
    check(eitn_system_from_json(text.c_str(), &raw), "config " + o.config);
    return SystemPtr(raw);
}

std::vector<double> grid_values(const eitn_grid& g) {
    std::vector<double> v(g.n_points);
    check(eitn_grid_values(&g, v.data()), "grid");
    return v;
}

eitn_grid resolve_grid(const Options& o, const eitn_system* sys) {
    eitn_grid g{};
    if (!o.grid.empty()) {
        check(eitn_parse_grid(o.grid.c_str(), &g), "--grid");
    } else {
        check(eitn_system_grid(sys, &g, nullptr), "grid");
    }
    return g;
}

int run_steady(const Options& o) {
    SystemPtr sys = load_system(o);
    eitn_steady st{};
    eitn_regime regime{};
    check(eitn_steady_state(sys.get(), &st), "steady");
    check(eitn_regime_report(sys.get(), &regime), "regime");

    json closed = json::object();
    double r2 = 0, r3 = 0;
    for (int corrected = 0; corrected < 2; ++corrected) {
        if (eitn_population_ratios(sys.get(), corrected, &r2, &r3) == EITN_OK) {
            closed[corrected ? "corrected" : "repeated_t31"] = {
                {"rho22_over_rho11", encode_number(r2)}, {"rho33_over_rho11", encode_number(r3)}};
        }
    }

    const fs::path dir = make_run_dir(o, "steady");
    write_csv(dir / "steady.csv", [&](std::ostream& os) { write_steady_csv(os, st, regime); });
    const json record = {{"steady", to_json(st)}, {"regime", to_json(regime)},
                         {"closed_form_ratios", closed}};
    write_text(dir / "steady.json", record.dump(2) + "\n");
    write_meta(dir, "steady", o, sys.get(), json::object());

    std::printf("rho11 = %.10g  rho22 = %.10g  rho33 = %.10g\n", st.rho11, st.rho22, st.rho33);
    std::printf("sigma32 = %.10g %+.10gi  regime = %s\n", st.sigma32_re, st.sigma32_im,
                regime.name);
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

int run_spectrum(const Options& o) {
    SystemPtr sys = load_system(o);
    const eitn_grid g = resolve_grid(o, sys.get());
    const std::vector<double> delta = grid_values(g);
    const double tol = o.tolerance.value_or(1e-9);

    SpectrumRecord rec;
    rec.rows.resize(delta.size());
    check(eitn_spectrum(sys.get(), EITN_ROUTE_GENERAL, delta.data(), delta.size(), rec.rows.data()),
          "spectrum");
    check(eitn_verify_fdt(rec.rows.data(), rec.rows.size(), tol, &rec.report), "verify");
    check(eitn_limiting_s(sys.get(), &rec.limits), "limits");
    check(eitn_regime_report(sys.get(), &rec.regime), "regime");

    const fs::path dir = make_run_dir(o, "spectrum");
    write_csv(dir / "spectrum.csv", [&](std::ostream& os) { write_spectrum_csv(os, rec.rows); });
    write_text(dir / "spectrum.json", to_json(rec).dump(2) + "\n");
    write_meta(dir, "spectrum", o, sys.get(),
               {{"grid", {{"min", g.min}, {"max", g.max}, {"n_points", g.n_points},
                          {"spacing", g.log_spacing ? "log" : "linear"}}},
                {"tolerance", tol}});

    std::printf("%zu rows, %zu flagged as gain\n", rec.rows.size(), rec.report.gain_rows);
    std::printf("max |S_asm - S_an|/(S_an + 1) = %.3e  max commutator residual = %.3e\n",
                rec.report.max_s_deviation, rec.report.max_commutator_residual);
    std::printf("wrote %s\n", dir.string().c_str());
    if (!rec.report.passed) {
        std::fprintf(stderr, "verification above tolerance %.3g\n", tol);
        return kExitFailure;
    }
    return 0;
}

int run_sweep(const Options& o) {
    SystemPtr base = load_system(o);
    eitn_sweep spec{};
    int present = 0;
    check(eitn_system_sweep(base.get(), &spec, &present), "sweep");
    if (!o.axis.empty()) {
        check(eitn_axis_from_name(o.axis.c_str(), &spec.axis), "--axis");
    } else if (!present) {
        throw CliError{kExitConfig, "sweep: give --axis or a \"sweep\" block in the config"};
    }
    if (!o.grid.empty()) {
        check(eitn_parse_grid(o.grid.c_str(), &spec.range), "--grid");
    } else if (!present) {
        throw CliError{kExitConfig, "sweep: give --grid or sweep.range in the config"};
    }
    const std::vector<double> values = grid_values(spec.range);

    SweepRecord rec;
    rec.axis = eitn_axis_name(spec.axis);
    rec.delta = spec.delta;
    for (double v : values) {
        SweepPoint p;
        p.value = v;
        SystemPtr holder;
        const eitn_system* sys = base.get();
        double delta = spec.delta;
        if (spec.axis == EITN_AXIS_DELTA) {
            delta = v;
        } else {
            eitn_system* raw = nullptr;
            check(eitn_system_with(base.get(), spec.axis, v, &raw),
                  rec.axis + " = " + format_number(v));
            holder.reset(raw);
            sys = raw;
        }
        check(eitn_spectrum(sys, EITN_ROUTE_GENERAL, &delta, 1, &p.row), "spectrum");
        check(eitn_steady_state(sys, &p.steady), "steady");
        eitn_regime regime{};
        check(eitn_regime_report(sys, &regime), "regime");
        p.regime = regime.kind;
        rec.points.push_back(p);
    }

    const fs::path dir = make_run_dir(o, "sweep");
    write_csv(dir / "sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, rec); });
    write_text(dir / "sweep.json", to_json(rec).dump(2) + "\n");
    write_meta(dir, "sweep", o, base.get(),
               {{"sweep",
                 {{"axis", rec.axis},
                  {"delta", spec.delta},
                  {"range", {{"min", spec.range.min}, {"max", spec.range.max},
                             {"n_points", spec.range.n_points},
                             {"spacing", spec.range.log_spacing ? "log" : "linear"}}}}}});

    std::size_t gain = 0;
    for (const auto& p : rec.points) gain += p.row.gain ? 1 : 0;
    std::printf("%zu points along %s, %zu flagged as gain\n", rec.points.size(), rec.axis.c_str(),
                gain);
    if (!rec.points.empty()) {
        std::printf("S: %.6g -> %.6g\n", rec.points.front().row.s_assembled,
                    rec.points.back().row.s_assembled);
    }
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

int run_simulate(const Options& o) {
    SystemPtr sys = load_system(o);
    eitn_sim_config cfg{};
    check(eitn_system_simulation(sys.get(), &cfg, nullptr), "simulation");
    if (o.seed) cfg.seed = *o.seed;
    if (o.n_traj) cfg.n_traj = *o.n_traj;
    if (o.dt) cfg.dt = *o.dt;
    if (o.workers) cfg.workers = *o.workers;
    const double tol = o.tolerance.value_or(0.05);

    double l16[16];
    check(eitn_noise_cholesky(sys.get(), l16), "noise covariance");

    eitn_sim_spectrum* raw = nullptr;
    check(eitn_simulate(sys.get(), &cfg, &raw), "simulate");
    SimPtr sim(raw);

    SimulationRecord rec;
    check(eitn_sim_info_get(sim.get(), &rec.info), "simulate");
    rec.rows.resize(rec.info.n_bins);
    check(eitn_sim_compare(sys.get(), sim.get(), rec.rows.data(), &rec.summary), "compare");

    const fs::path dir = make_run_dir(o, "simulate");
    write_csv(dir / "simulate.csv", [&](std::ostream& os) { write_simulation_csv(os, rec.rows); });
    write_text(dir / "simulate.json", to_json(rec).dump(2) + "\n");
    write_meta(dir, "simulate", o, sys.get(),
               {{"seed", cfg.seed},
                {"simulation",
                 {{"dt", cfg.dt},
                  {"n_steps", cfg.n_steps},
                  {"n_traj", cfg.n_traj},
                  {"burn_in", cfg.burn_in},
                  {"burn_in_steps", rec.info.burn_in_steps},
                  {"integrator", cfg.integrator == EITN_INTEGRATOR_EXACT ? "exact" : "euler-maruyama"},
                  {"welch",
                   {{"segment_length", rec.info.segment_length},
                    {"overlap", cfg.overlap},
                    {"window", cfg.window == EITN_WINDOW_HANN ? "hann" : "rectangular"}}},
                  {"band_halfwidth", cfg.band_halfwidth}}},
                {"tolerance", tol}});

    const bool ok = rec.summary.max_relative_deviation < tol && std::abs(rec.summary.band_power_z) < 3.0;
    std::printf("%-38s %s\n", "quantity", "value");
    std::printf("%-38s %.4f\n", "max |psd/expected - 1| in band", rec.summary.max_relative_deviation);
    std::printf("%-38s %.4f\n", "max |psd/analytic - 1| in band", rec.summary.max_raw_relative_deviation);
    std::printf("%-38s %.3f\n", "band power z-score", rec.summary.band_power_z);
    std::printf("%-38s %.4f\n", "bins within 3 stderr", rec.summary.fraction_within_3sigma);
    std::printf("%-38s %s\n", "verdict", ok ? "agree" : "disagree");
    std::printf("wrote %s\n", dir.string().c_str());
    return ok ? 0 : kExitFailure;
}

int run_dump_diffusion(const Options& o) {
    SystemPtr sys = load_system(o);
    double gre[36], gim[36], ore[36], oim[36];
    check(eitn_diffusion(sys.get(), EITN_ROUTE_GENERAL, gre, gim), "diffusion");
    check(eitn_diffusion(sys.get(), EITN_ROUTE_OFFDIAGONAL, ore, oim), "diffusion");
    double min_eig = 0, trace = 0;
    int psd_ok = 0;
    check(eitn_covariance_psd(sys.get(), &min_eig, &trace, &psd_ok), "covariance");

    std::vector<DiffusionEntry> entries;
    json forces = json::array();
    for (int a = 0; a < EITN_N_FORCES; ++a) {
        eitn_force_info fa{};
        check(eitn_force_info_get(a, &fa), "force");
        forces.push_back({{"name", fa.name},
                          {"basis_note", fa.basis_note},
                          {"carrier", {fa.carrier_probe, fa.carrier_drive}}});
        for (int b = 0; b < EITN_N_FORCES; ++b) {
            eitn_force_info fb{};
            check(eitn_force_info_get(b, &fb), "force");
            DiffusionEntry e;
            e.a = fa.name;
            e.b = fb.name;
            e.general_re = gre[a * 6 + b];
            e.general_im = gim[a * 6 + b];
            e.offdiag_re = ore[a * 6 + b];
            e.offdiag_im = oim[a * 6 + b];
            e.shift_probe = fa.carrier_probe + fb.carrier_probe;
            e.shift_drive = fa.carrier_drive + fb.carrier_drive;
            entries.push_back(e);
        }
    }

    const fs::path dir = make_run_dir(o, "dump-diffusion");
    write_csv(dir / "diffusion.csv", [&](std::ostream& os) { write_diffusion_csv(os, entries); });
    const json record = {{"forces", forces},
                         {"symmetrized_covariance",
                          {{"min_eigenvalue", encode_number(min_eig)},
                           {"trace", encode_number(trace)},
                           {"positive_semidefinite", psd_ok != 0}}}};
    write_text(dir / "diffusion.json", record.dump(2) + "\n");
    write_meta(dir, "dump-diffusion", o, sys.get(), json::object());

    double max_diff = 0;
    for (int i = 0; i < 36; ++i) {
        max_diff = std::max(max_diff, std::hypot(gre[i] - ore[i], gim[i] - oim[i]));
    }
    std::printf("max |general - off-diagonal form| = %.3e, symmetrized covariance %s\n", max_diff,
                psd_ok ? "PSD" : "NOT PSD");
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Noise polarization of a driven three-level Lambda medium"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(eitn_version()));

    Options opts;
    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const Options&);
    };
    const Sub subs[] = {
        {"steady", "populations, drive coherence and regime report", run_steady},
        {"spectrum", "S, chi^aH and FDT checks over a detuning grid", run_spectrum},
        {"sweep", "S and FDT violation along one parameter axis", run_sweep},
        {"simulate", "Langevin ensemble and comparison with the analytic spectrum", run_simulate},
        {"dump-diffusion", "diffusion coefficients of the Langevin forces", run_dump_diffusion},
    };
    std::vector<std::pair<CLI::App*, const Sub*>> registered;
    for (const Sub& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, opts);
        registered.emplace_back(sub, &s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        for (const auto& [sub, s] : registered) {
            if (sub->parsed()) return s->run(opts);
        }
    } catch (const CliError& e) {
        std::fprintf(stderr, "error: %s\n", e.message.c_str());
        return e.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}
