#include "eitnoise/eitnoise.h"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {

const char* kClearEit = R"({
  "omega31": 100000, "omega21": 10, "a21": 0.0001, "a31": 1, "a32": 1,
  "gamma31": 1, "gamma21": 0.001, "gamma32": 1,
  "temperature": {"occupations": {"n21": 2.578, "n31": 0, "n32": 0}},
  "drive_rabi": 0.17320508075688773,
  "simulation": {"n_steps": 32768, "n_traj": 70, "seed": 5, "welch": {"segment_length": 4096}}
})";

// Dephasing below the radiative floor: the symmetrized force covariance
// cannot come from a classical noise.
const char* kSubRadiative = R"({
  "omega31": 100, "omega21": 1, "a21": 0.1, "a31": 1, "a32": 1,
  "gamma31": 0.17, "gamma21": 0.0066, "gamma32": 0.09,
  "temperature": {"occupations": {"n21": 5.8, "n31": 0.054, "n32": 0.0063}},
  "drive_rabi": 0.49
})";

struct System {
    eitn_system* p = nullptr;
    explicit System(const char* json) { REQUIRE(eitn_system_from_json(json, &p) == EITN_OK); }
    ~System() { eitn_system_free(p); }
};

}  // namespace

TEST_SUITE("c-api") {

TEST_CASE("status reporting") {
    CHECK(std::strlen(eitn_version()) > 0);
    CHECK(std::string(eitn_status_name(EITN_ERR_GAIN_MEDIUM)) != "");
    eitn_system* s = nullptr;
    CHECK(eitn_system_from_json("{\"omega31\": 1}", &s) == EITN_ERR_CONFIG);
    CHECK(s == nullptr);
    CHECK(std::string(eitn_last_error()).find("omega21") != std::string::npos);
    CHECK(eitn_system_from_json(nullptr, &s) == EITN_ERR_INVALID_ARGUMENT);
    CHECK(eitn_system_from_json(kClearEit, nullptr) == EITN_ERR_INVALID_ARGUMENT);
    eitn_system_free(nullptr);
    eitn_sim_free(nullptr);
    eitn_string_free(nullptr);
}

TEST_CASE("system info and regime") {
    System sys(kClearEit);
    eitn_system_info info{};
    REQUIRE(eitn_system_info_get(sys.p, &info) == EITN_OK);
    CHECK(info.rate_unit == 1.0);
    CHECK(info.gamma21 == 0.001);
    CHECK(info.n21 == 2.578);
    CHECK(info.kelvin_mode == 0);

    eitn_regime r{};
    REQUIRE(eitn_regime_report(sys.p, &r) == EITN_OK);
    CHECK(r.kind == EITN_REGIME_MARGINAL);
    CHECK(std::string(r.name) == eitn_regime_name(r.kind));

    eitn_steady st{};
    REQUIRE(eitn_steady_state(sys.p, &st) == EITN_OK);
    CHECK(st.rho11 + st.rho22 + st.rho33 == doctest::Approx(1.0).epsilon(1e-14));

    char* text = nullptr;
    REQUIRE(eitn_system_to_json(sys.p, &text) == EITN_OK);
    System again(text);
    eitn_string_free(text);
    eitn_system_info info2{};
    REQUIRE(eitn_system_info_get(again.p, &info2) == EITN_OK);
    CHECK(info2.fingerprint == info.fingerprint);
}

TEST_CASE("SI input is expressed in units of gamma31") {
    System sys(R"({"units": "si", "omega31": 2.37e15, "omega21": 4.29e10, "a21": 0.36,
                  "a31": 3.6e7, "a32": 3.6e7, "temperature": {"kelvin": 1.0}, "drive_rabi": 2e6})");
    eitn_system_info info{};
    REQUIRE(eitn_system_info_get(sys.p, &info) == EITN_OK);
    CHECK(info.gamma31 == doctest::Approx(1.0));
    CHECK(info.rate_unit == doctest::Approx(3.6e7).epsilon(1e-3));
    CHECK(info.kelvin_mode == 1);
    CHECK(info.log_n31 < -1e4);
}

TEST_CASE("spectrum, verification and limits") {
    System sys(kClearEit);
    eitn_grid g{};
    REQUIRE(eitn_parse_grid("-10:10:200", &g) == EITN_OK);
    std::vector<double> delta(g.n_points);
    REQUIRE(eitn_grid_values(&g, delta.data()) == EITN_OK);
    std::vector<eitn_spectrum_row> rows(delta.size());
    REQUIRE(eitn_spectrum(sys.p, EITN_ROUTE_GENERAL, delta.data(), delta.size(), rows.data()) == EITN_OK);
    eitn_fdt_report rep{};
    REQUIRE(eitn_verify_fdt(rows.data(), rows.size(), 1e-9, &rep) == EITN_OK);
    CHECK(rep.passed == 1);
    CHECK(rep.gain_rows == 0);

    double chi = 0, s = 0;
    REQUIRE(eitn_susceptibility(sys.p, delta[57], &chi) == EITN_OK);
    CHECK(chi == rows[57].chi_aH_imag);
    REQUIRE(eitn_noise_factor(sys.p, delta[57], &s) == EITN_OK);
    CHECK(s == rows[57].s_analytic);

    eitn_limits lim{};
    REQUIRE(eitn_limiting_s(sys.p, &lim) == EITN_OK);
    CHECK(lim.s_low_temperature == doctest::Approx(2 * 2.578));
    CHECK(eitn_spectrum(sys.p, EITN_ROUTE_GENERAL, nullptr, 3, rows.data()) == EITN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("diffusion routes and correlators") {
    System sys(kClearEit);
    double gre[36], gim[36], ore[36], oim[36];
    REQUIRE(eitn_diffusion(sys.p, EITN_ROUTE_GENERAL, gre, gim) == EITN_OK);
    REQUIRE(eitn_diffusion(sys.p, EITN_ROUTE_OFFDIAGONAL, ore, oim) == EITN_OK);
    for (int i = 0; i < 36; ++i) {
        CHECK(std::abs(gre[i] - ore[i]) < 1e-15);
        CHECK(std::abs(gim[i] - oim[i]) < 1e-15);
    }
    double re = 0, im = 0;
    int sp = 0, sd = 0;
    REQUIRE(eitn_spectral_correlator(sys.p, 0, 1, &re, &im, &sp, &sd) == EITN_OK);
    CHECK(re == doctest::Approx(gre[1] / (2 * M_PI)));
    CHECK(eitn_spectral_correlator(sys.p, 0, 9, &re, &im, &sp, &sd) == EITN_ERR_UNKNOWN_PAIR);
    eitn_force_info f{};
    REQUIRE(eitn_force_info_get(2, &f) == EITN_OK);
    CHECK(std::string(f.name) == "f21");
    CHECK(eitn_force_info_get(6, &f) == EITN_ERR_UNKNOWN_PAIR);

    double min_eig = 0, trace = 0;
    int ok = 0;
    REQUIRE(eitn_covariance_psd(sys.p, &min_eig, &trace, &ok) == EITN_OK);
    CHECK(ok == 1);
}

TEST_CASE("parameter substitution") {
    System sys(kClearEit);
    eitn_system* strong = nullptr;
    REQUIRE(eitn_system_with(sys.p, EITN_AXIS_DRIVE, 1.0, &strong) == EITN_OK);
    eitn_system_info info{};
    REQUIRE(eitn_system_info_get(strong, &info) == EITN_OK);
    CHECK(std::hypot(info.drive_re, info.drive_im) == doctest::Approx(1.0));
    eitn_regime r{};
    REQUIRE(eitn_regime_report(strong, &r) == EITN_OK);
    CHECK(r.kind == EITN_REGIME_SATURATED);
    eitn_system_free(strong);

    eitn_system* hot = nullptr;
    CHECK(eitn_system_with(sys.p, EITN_AXIS_TEMPERATURE, 1.0, &hot) == EITN_ERR_CONFIG);
    eitn_axis ax{};
    CHECK(eitn_axis_from_name("gamma21", &ax) == EITN_OK);
    CHECK(ax == EITN_AXIS_GAMMA21);
    CHECK(std::string(eitn_axis_name(ax)) == "gamma21");
    CHECK(eitn_axis_from_name("volume", &ax) == EITN_ERR_CONFIG);
}

TEST_CASE("simulation handle") {
    System sys(kClearEit);
    eitn_sim_config cfg{};
    int present = 0;
    REQUIRE(eitn_system_simulation(sys.p, &cfg, &present) == EITN_OK);
    CHECK(present == 1);
    CHECK(cfg.n_traj == 70);
    cfg.workers = 2;
    eitn_sim_spectrum* sim = nullptr;
    REQUIRE(eitn_simulate(sys.p, &cfg, &sim) == EITN_OK);
    eitn_sim_info info{};
    REQUIRE(eitn_sim_info_get(sim, &info) == EITN_OK);
    CHECK(info.n_bins == 4096);
    std::vector<eitn_sim_row> rows(info.n_bins);
    eitn_sim_summary sum{};
    REQUIRE(eitn_sim_compare(sys.p, sim, rows.data(), &sum) == EITN_OK);
    CHECK(sum.band_bins > 100);
    CHECK(sum.fraction_within_3sigma > 0.95);
    CHECK(rows[info.n_bins / 2].nu == 0.0);
    eitn_sim_free(sim);

    cfg.dt = 1.0;
    CHECK(eitn_simulate(sys.p, &cfg, &sim) == EITN_ERR_GUARD);
    CHECK(std::string(eitn_last_error()).find("dt") != std::string::npos);
}

TEST_CASE("non-classical force covariance is refused") {
    System sys(kSubRadiative);
    double l16[16];
    CHECK(eitn_noise_cholesky(sys.p, l16) == EITN_ERR_NOT_PSD);
    double min_eig = 0, trace = 0;
    int ok = 1;
    REQUIRE(eitn_covariance_psd(sys.p, &min_eig, &trace, &ok) == EITN_OK);
    CHECK(ok == 0);
    eitn_sim_config cfg{};
    REQUIRE(eitn_system_simulation(sys.p, &cfg, nullptr) == EITN_OK);
    eitn_sim_spectrum* sim = nullptr;
    CHECK(eitn_simulate(sys.p, &cfg, &sim) == EITN_ERR_NOT_PSD);
    CHECK(sim == nullptr);
}

}  // TEST_SUITE
