#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every
// (key, counter) pair maps to four independent 32-bit words, so each
// trajectory and step owns its own random numbers regardless of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace eitnoise {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{m0} * c[0];
        const std::uint64_t p1 = std::uint64_t{m1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

// Uniform in (0, 1), never 0 or 1.
inline double u32_to_open_unit(std::uint32_t u) {
    return (static_cast<double>(u) + 0.5) * (1.0 / 4294967296.0);
}

// Four standard normals from one block via two Box-Muller pairs.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::array<double, 4> normals(std::uint64_t index) const {
        const PhiloxCounter r = philox4x32_10(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
             stream_lo_, stream_hi_},
            key_);
        std::array<double, 4> z;
        for (int p = 0; p < 2; ++p) {
            const double rad = std::sqrt(-2.0 * std::log(u32_to_open_unit(r[2 * p])));
            const double ang = 2.0 * std::numbers::pi * u32_to_open_unit(r[2 * p + 1]);
            z[2 * p] = rad * std::cos(ang);
            z[2 * p + 1] = rad * std::sin(ang);
        }
        return z;
    }

private:
    PhiloxKey key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

}  // namespace eitnoise
