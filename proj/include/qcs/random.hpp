#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace qcs {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Portable random stream used by every generator in the library.
///
/// Core generator is xoshiro256** (Blackman & Vigna), state seeded from a
/// single 64-bit seed through four successive SplitMix64 outputs. Normals
/// use the Marsaglia polar form of Box-Muller; both values of each accepted
/// pair are consumed (the second is cached for the next call). Output is
/// bit-identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound), bound >= 1. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal N(0, 1).
    double normal();

private:
    std::array<std::uint64_t, 4> state_;
    std::optional<double> spare_;
};

/// Independent sub-stream seed for a given stream index.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace qcs
