#include "philox.hpp"
#include "welch.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

using namespace eitnoise;
using cd = std::complex<double>;

TEST_SUITE("welch") {

TEST_CASE("Philox4x32-10 known-answer vectors") {
    // Random123 kat_vectors
    auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(r == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    r = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(r == PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    r = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(r == PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("Gaussian stream moments and independence of streams") {
    GaussianStream a(42, 0), b(42, 1);
    double sum = 0, sum2 = 0, cross = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const auto za = a.normals(i);
        const auto zb = b.normals(i);
        for (int k = 0; k < 4; ++k) {
            sum += za[k];
            sum2 += za[k] * za[k];
            cross += za[k] * zb[k];
        }
    }
    const double m = 4.0 * n;
    CHECK(std::abs(sum / m) < 5.0 / std::sqrt(m));
    CHECK(std::abs(sum2 / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
    CHECK(std::abs(cross / m) < 5.0 / std::sqrt(m));
    CHECK(a.normals(7) == GaussianStream(42, 0).normals(7));
    CHECK(u32_to_open_unit(0) > 0.0);
    CHECK(u32_to_open_unit(0xffffffffu) < 1.0);
}

TEST_CASE("windows") {
    const auto h = make_window(WindowKind::Hann, 8);
    CHECK(h[0] == 0.0);
    CHECK(h[4] == doctest::Approx(1.0));
    CHECK(h[2] == doctest::Approx(h[6]));
    const auto r = make_window(WindowKind::Rectangular, 5);
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == 5.0);
    CHECK(window_from_name(window_name(WindowKind::Hann)) == WindowKind::Hann);
    CHECK_THROWS(window_from_name("blackman"));
}

TEST_CASE("segmenting and frequency axis") {
    WelchEstimator w(16, 0.5, WindowKind::Hann, 0.1);
    CHECK(w.hop() == 8);
    CHECK(w.segment_count(16) == 1);
    CHECK(w.segment_count(40) == 4);
    const auto f = w.frequencies();
    REQUIRE(f.size() == 16);
    CHECK(f[8] == 0.0);
    CHECK(f[0] == doctest::Approx(-std::numbers::pi / 0.1));
    CHECK(f[9] - f[8] == doctest::Approx(2.0 * std::numbers::pi / 1.6));
}

TEST_CASE("single tone lands in its bin with Parseval scaling") {
    const std::size_t l = 64;
    const double dt = 0.5;
    WelchEstimator w(l, 0.0, WindowKind::Rectangular, dt);
    const auto f = w.frequencies();
    const std::size_t bin = 40;
    std::vector<cd> x(l);
    for (std::size_t n = 0; n < l; ++n) x[n] = std::polar(1.0, -f[bin] * n * dt);
    std::vector<double> psd(l);
    w.estimate(x.data(), l, psd.data());
    // P = dt |sum|^2 / (2 pi L) = dt L / (2 pi)
    CHECK(psd[bin] == doctest::Approx(dt * l / (2.0 * std::numbers::pi)));
    double total = 0;
    for (double p : psd) total += p;
    // sum_k P_k * dnu = mean |x|^2
    CHECK(total * 2.0 * std::numbers::pi / (l * dt) == doctest::Approx(1.0));
    for (std::size_t k = 0; k < l; ++k) {
        if (k != bin) CHECK(psd[k] < 1e-20);
    }
}

TEST_CASE("white noise has a flat expected periodogram") {
    const double dt = 0.1;
    std::vector<double> win = make_window(WindowKind::Hann, 32);
    std::vector<cd> c(32, 0.0);
    c[0] = 2.0;  // variance 2 per sample
    const auto e = expected_periodogram(win, c, dt);
    for (double v : e) CHECK(v == doctest::Approx(2.0 * dt / (2.0 * std::numbers::pi)));
}

TEST_CASE("autocovariance of a Lorentzian spectrum") {
    // S(nu) = (q / 2 pi) / (g^2 + nu^2)  <->  c(t) = q exp(-g |t|) / (2 g)
    const double g = 1.3, q = 0.7, dt = 0.05;
    auto spectrum = [&](const std::vector<double>& nu, std::vector<double>& out) {
        out.resize(nu.size());
        for (std::size_t i = 0; i < nu.size(); ++i) out[i] = q / (2.0 * std::numbers::pi) / (g * g + nu[i] * nu[i]);
    };
    const auto c = autocovariance_from_spectrum(spectrum, dt, 100, 1u << 14);
    for (std::size_t k : {0u, 1u, 10u, 99u}) {
        const double expect = q * std::exp(-g * k * dt) / (2.0 * g);
        CHECK(std::abs(c[k] - expect) < 1e-4 * q / (2.0 * g));
    }
}

TEST_CASE("estimate is reentrant and matches a direct DFT") {
    const std::size_t l = 32, n = 80;
    const double dt = 0.2;
    WelchEstimator w(l, 0.5, WindowKind::Hann, dt);
    GaussianStream g(3, 0);
    std::vector<cd> x(n);
    for (std::size_t i = 0; i < n; i += 2) {
        const auto z = g.normals(i);
        x[i] = {z[0], z[1]};
        x[i + 1] = {z[2], z[3]};
    }
    std::vector<double> psd(l), again(l);
    w.estimate(x.data(), n, psd.data());
    w.estimate(x.data(), n, again.data());
    CHECK(psd == again);

    const auto f = w.frequencies();
    const auto& win = w.window();
    const double power = std::inner_product(win.begin(), win.end(), win.begin(), 0.0);
    const std::size_t segs = w.segment_count(n);
    for (std::size_t k = 0; k < l; ++k) {
        double acc = 0;
        for (std::size_t s = 0; s < segs; ++s) {
            cd sum = 0;
            for (std::size_t j = 0; j < l; ++j) {
                sum += win[j] * x[s * w.hop() + j] * std::polar(1.0, f[k] * j * dt);
            }
            acc += dt * std::norm(sum) / (2.0 * std::numbers::pi * power);
        }
        CHECK(psd[k] == doctest::Approx(acc / segs).epsilon(1e-12));
    }
}

}  // TEST_SUITE
