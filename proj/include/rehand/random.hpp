#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "rehand/bytes.hpp"

namespace rehand {

/// Randomness for nonces, keys and simulation draws.
///
/// Seeded mode is a 64-bit Mersenne Twister, whose output sequence is fixed
/// by the standard, with hand-rolled bounded/real draws so transcripts are
/// identical across standard libraries. Entropy mode reads the OS CSPRNG.
/// An instance belongs to one entity and is never shared.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : engine_(seed), seeded_(true) {}

    static RandomSource from_os_entropy();

    /// Independent child stream, deterministic in (seed, stream) when seeded.
    RandomSource split(std::uint64_t stream);

    std::uint64_t next_u64();
    void fill(std::span<std::uint8_t> out);

    /// Uniform in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n);
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01();
    /// Exponential with the given rate (events per unit); rate must be positive.
    double exponential(double rate);
    bool bernoulli(double p) { return uniform01() < p; }

    template <class Block>
    Block block() {
        Block b;
        fill(b.bytes());
        return b;
    }

    bool seeded() const noexcept { return seeded_; }

private:
    RandomSource() : engine_(0), seeded_(false) {}

    std::mt19937_64 engine_;
    bool seeded_;
};

/// SplitMix64 finalizer, used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace rehand
