#include "malvol/noise.hpp"

#include <cmath>
#include <numbers>

namespace malvol {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;

__extension__ using u128 = unsigned __int128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const u128 p = static_cast<u128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

// 53-bit uniform on the open interval (0, 1).
inline double to_open_unit(std::uint64_t x) {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> c,
                                        std::array<std::uint64_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kW0;
            k[1] += kW1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::array<double, 4> NoiseStream::block(std::uint64_t block_index) const noexcept {
    const auto bits = philox4x64({block_index, path_, static_cast<std::uint64_t>(purpose_), 0},
                                 {seed_, 0x6D616C766F6C0000ULL});
    std::array<double, 4> out{};
    for (int pair = 0; pair < 2; ++pair) {
        const double u1 = to_open_unit(bits[2 * pair]);
        const double u2 = to_open_unit(bits[2 * pair + 1]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        out[2 * pair] = radius * std::cos(angle);
        out[2 * pair + 1] = radius * std::sin(angle);
    }
    if (negate_) {
        for (double& z : out) z = -z;
    }
    return out;
}

double NoiseStream::normal(std::uint64_t index) const noexcept {
    return block(index / 4)[index % 4];
}

void NoiseStream::fill_normals(std::span<double> out) const noexcept {
    std::size_t i = 0;
    for (std::uint64_t b = 0; i < out.size(); ++b) {
        const auto z = block(b);
        for (std::size_t j = 0; j < 4 && i < out.size(); ++j, ++i) out[i] = z[j];
    }
}

}  // namespace malvol
