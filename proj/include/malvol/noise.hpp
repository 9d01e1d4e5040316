#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace malvol {

/// Philox4x64-10 block function (Salmon et al., Random123).
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

enum class StreamPurpose : std::uint64_t {
    Volatility = 1,  ///< drives W~ (the volatility factor)
    Asset = 2,       ///< drives W (terminal asset draw)
};

/// Deterministic standard-normal stream keyed by (seed, path, purpose).
///
/// Normal number i is a pure function of (seed, path_index, purpose, i), so
/// results do not depend on how paths are scheduled across threads.
/// `negate` flips the sign of every draw (antithetic partner).
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t path_index, StreamPurpose purpose,
                bool negate = false) noexcept
        : seed_(seed), path_(path_index), purpose_(purpose), negate_(negate) {}

    double normal(std::uint64_t index) const noexcept;
    void fill_normals(std::span<double> out) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t path_index() const noexcept { return path_; }
    StreamPurpose purpose() const noexcept { return purpose_; }

private:
    /// Four normals from one Philox block (two Box-Muller pairs).
    std::array<double, 4> block(std::uint64_t block_index) const noexcept;

    std::uint64_t seed_;
    std::uint64_t path_;
    StreamPurpose purpose_;
    bool negate_;
};

}  // namespace malvol
