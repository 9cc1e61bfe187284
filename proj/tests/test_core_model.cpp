#include "generators.hpp"

#include "error.hpp"

#include <doctest.h>

#include <limits>

using namespace eitn_test;

TEST_SUITE("core-model") {

TEST_CASE("thermal occupation identities") {
    CHECK(thermal_occupation(std::log(2.0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(thermal_occupation(std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(thermal_occupation(1e-8) == doctest::Approx(1e8).epsilon(1e-7));
    CHECK_THROWS_AS(thermal_occupation(0.0), Error);
    CHECK_THROWS_AS(thermal_occupation(-1.0), Error);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), Error);
}

TEST_CASE("log occupation stays finite where the occupation underflows") {
    CHECK(std::isfinite(log_thermal_occupation(2e4)));
    CHECK(log_thermal_occupation(2e4) == doctest::Approx(-2e4));
    CHECK(log_thermal_occupation(0.5) == doctest::Approx(std::log(thermal_occupation(0.5))).epsilon(1e-14));
    CHECK(planck_exponent_from_occupation(1.0) == doctest::Approx(std::log(2.0)));
    CHECK(std::isinf(planck_exponent_from_occupation(0.0)));
}

TEST_CASE("build_relaxation substitution examples") {
    LambdaSystem s;
    s.omega31 = 10.0;
    s.omega21 = 1.0;
    s.a21 = 1.0;
    s.a31 = 0.5;
    s.a32 = 0.25;
    s.temperature = Occupations{1.0, 0.0, 0.0};
    const RelaxationModel m = build_relaxation(s);
    CHECK(m.w(L1, L2) == doctest::Approx(2.0));
    CHECK(m.w(L2, L1) == doctest::Approx(1.0));
    CHECK(m.w(L3, L1) == 0.0);
    CHECK(m.w(L1, L3) == doctest::Approx(0.5));

    SUBCASE("zero temperature: no uphill rates") {
        s.temperature = Kelvin{0.0};
        const RelaxationModel z = build_relaxation(s);
        CHECK(z.w(L2, L1) == 0.0);
        CHECK(z.w(L3, L1) == 0.0);
        CHECK(z.w(L3, L2) == 0.0);
        CHECK(z.w(L1, L2) == doctest::Approx(1.0));
        CHECK(z.w(L2, L3) == doctest::Approx(0.25));
    }
    SUBCASE("A21 = 0 decouples the ground doublet") {
        s.a21 = 0.0;
        const RelaxationModel z = build_relaxation(s);
        CHECK(z.w(L1, L2) == 0.0);
        CHECK(z.w(L2, L1) == 0.0);
    }
}

TEST_CASE("radiative transverse rates") {
    LambdaSystem s;
    s.omega31 = 10.0;
    s.omega21 = 1.0;
    s.a31 = 3.0;
    s.temperature = Kelvin{0.0};
    const RelaxationModel m = build_relaxation(s);
    CHECK(m.gamma31() == doctest::Approx(1.5));
    CHECK(m.gamma32() == doctest::Approx(1.5));
    CHECK(m.gamma21() == 0.0);

    RelaxationModel empty;
    CHECK(radiative_transverse_rates(empty).isZero());
}

TEST_CASE("explicit transverse rates override the radiative ones") {
    LambdaSystem s;
    s.omega31 = 10.0;
    s.omega21 = 1.0;
    s.a31 = 1.0;
    s.a32 = 1.0;
    s.gamma21 = 1e-3;
    s.gamma31 = 2.0;
    const RelaxationModel m = build_relaxation(s);
    CHECK(m.gamma21() == 1e-3);
    CHECK(m.gamma31() == 2.0);
    CHECK(m.gamma(L1, L3) == 2.0);
    CHECK(m.gamma32() == doctest::Approx(1.0));
}

TEST_CASE("validation names the field") {
    LambdaSystem s;
    s.omega31 = 1.0;
    s.omega21 = 2.0;
    s.a31 = 1.0;
    try {
        validate(s);
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        CHECK(std::string(e.what()).find("omega31") != std::string::npos);
    }
    s.omega31 = 3.0;
    s.temperature = Kelvin{1.0};
    CHECK_THROWS_AS(validate(s), Error);  // kelvin without frequency_unit
    s.frequency_unit = 1e9;
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("SI systems are rescaled by gamma31") {
    LambdaSystem s;
    s.units = Units::SI;
    s.omega31 = 2e15;
    s.omega21 = 4e10;
    s.a31 = 4e7;
    s.a32 = 4e7;
    s.a21 = 1.0;
    s.drive_rabi = 1e7;
    s.temperature = Kelvin{1.0};
    const InternalSystem in = to_internal_units(s);
    const RelaxationModel m = build_relaxation(in.system);
    CHECK(m.gamma31() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(in.system.drive_rabi.real() * in.rate_unit == doctest::Approx(1e7));
    const ThermalState a = thermal_state(s);
    const ThermalState b = thermal_state(in.system);
    CHECK(b.x21 == doctest::Approx(a.x21).epsilon(1e-14));
    CHECK(b.x31 == doctest::Approx(a.x31).epsilon(1e-14));
}

TEST_CASE("property: Planck ordering") {
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const double t = rng.log_uniform(1e-3, 1e3);
        const double w1 = rng.log_uniform(1e6, 1e15);
        const double w2 = w1 * (1.0 + rng.log_uniform(1e-6, 10.0));
        const double n1 = thermal_occupation(w1, t);
        const double n2 = thermal_occupation(w2, t);
        if (n1 == 0.0) continue;  // both underflow
        CHECK(n1 > n2);
    }
}

TEST_CASE("property: rate columns close and transverse rates are symmetric") {
    Rng rng(102);
    for (int i = 0; i < 1000; ++i) {
        const LambdaSystem s = random_system(rng);
        const RelaxationModel m = build_relaxation(s);
        const double scale = m.w.cwiseAbs().maxCoeff();
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(m.w.col(c).sum()) <= 1e-14 * scale);
            for (int r = 0; r < 3; ++r) {
                if (r != c) CHECK(m.w(r, c) >= 0.0);
            }
        }
        CHECK((m.gamma - m.gamma.transpose()).isZero(0.0));
        CHECK((radiative_transverse_rates(m) - radiative_transverse_rates(m).transpose()).isZero(0.0));
    }
}

TEST_CASE("property: detailed balance in kelvin mode") {
    Rng rng(103);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        LambdaSystem s = random_system(rng);
        if (!std::holds_alternative<Kelvin>(s.temperature)) continue;
        if (s.a21 == 0.0) s.a21 = 0.1;
        const RelaxationModel m = build_relaxation(s);
        const ThermalState th = thermal_state(s);
        const auto balance = [&](int lo, int hi, double x) {
            const double ratio = m.w(hi, lo) / m.w(lo, hi);
            CHECK(rel_err(ratio, std::exp(-x)) <= 1e-12);
        };
        balance(L1, L2, th.x21);
        balance(L1, L3, th.x31);
        balance(L2, L3, th.x32);
        CHECK(th.planck_consistent);
        ++checked;
    }
    CHECK(checked > 300);
}

}  // TEST_SUITE
