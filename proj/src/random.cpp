#include "rehand/random.hpp"

#include <cmath>
#include <stdexcept>

#include <openssl/rand.h>

namespace rehand {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

RandomSource RandomSource::from_os_entropy() { return RandomSource(); }

RandomSource RandomSource::split(std::uint64_t stream) {
    if (!seeded_) return from_os_entropy();
    return RandomSource(mix_seed(next_u64(), stream));
}

std::uint64_t RandomSource::next_u64() {
    if (seeded_) return engine_();
    std::uint64_t v = 0;
    if (RAND_bytes(reinterpret_cast<unsigned char*>(&v), sizeof v) != 1) {
        throw std::runtime_error("OS entropy source failed");
    }
    return v;
}

void RandomSource::fill(std::span<std::uint8_t> out) {
    if (!seeded_) {
        if (!out.empty() && RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
            throw std::runtime_error("OS entropy source failed");
        }
        return;
    }
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t w = engine_();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(w >> (56 - 8 * b));
        }
    }
}

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index over an empty range");
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double RandomSource::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be positive");
    return -std::log1p(-uniform01()) / rate;
}

}  // namespace rehand
