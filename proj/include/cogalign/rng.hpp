#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cogalign {

/// Name of the generator recorded in every report's metadata.
inline constexpr std::string_view kRngAlgorithm =
    "xoshiro256** (state seeded by splitmix64; normals by Box-Muller, cosine branch first)";

/// splitmix64 step; also used to derive child seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Child seed for stream `index` of a parent seed. Independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// xoshiro256** stream. Single-owner: fork with derive_seed rather than sharing.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1); never returns 0.
    double uniform_open();
    double normal();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t seed_;
    std::uint64_t position_ = 0;
    std::array<std::uint64_t, 4> s_{};
    std::optional<double> spare_normal_;
};

}  // namespace cogalign
