/**
 * @file bytes.hpp
 * @brief Byte strings, fixed-width 128-bit blocks and simulated timestamps.
 */
#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rehand {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

std::string to_hex(ByteView bytes);

/// Parses lower- or upper-case hex. Throws std::invalid_argument on odd length
/// or non-hex characters.
Bytes from_hex(std::string_view hex);

std::array<std::uint8_t, 8> be64(std::uint64_t v);
std::array<std::uint8_t, 2> be16(std::uint16_t v);
std::uint64_t read_be64(ByteView b);
std::uint16_t read_be16(ByteView b);

/// Equality in time independent of where the first difference is.
bool equal_ct(ByteView a, ByteView b) noexcept;

/// A 128-bit value. The tag keeps keys, digests, nonces and identities from
/// being mixed up by accident; block_cast converts explicitly where the
/// protocol reuses one as another (e.g. a digest becoming a session key).
template <class Tag>
class Block128 {
public:
    static constexpr std::size_t kSize = 16;
    static constexpr std::size_t kBits = 128;

    Block128() = default;
    explicit Block128(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}

    /// Throws std::invalid_argument unless exactly 16 bytes.
    static Block128 from_view(ByteView v);

    ByteView view() const noexcept { return ByteView(bytes_.data(), bytes_.size()); }
    const std::array<std::uint8_t, kSize>& bytes() const noexcept { return bytes_; }
    std::array<std::uint8_t, kSize>& bytes() noexcept { return bytes_; }
    std::string hex() const { return to_hex(view()); }

    friend bool operator==(const Block128& a, const Block128& b) noexcept {
        return equal_ct(a.view(), b.view());
    }
    // Ordering for use as a map key only.
    friend bool operator<(const Block128& a, const Block128& b) noexcept {
        return a.bytes_ < b.bytes_;
    }

private:
    std::array<std::uint8_t, kSize> bytes_{};
};

template <class Tag>
Block128<Tag> Block128<Tag>::from_view(ByteView v) {
    if (v.size() != kSize) {
        throw std::invalid_argument("expected a 16-byte value, got " + std::to_string(v.size()));
    }
    Block128 out;
    std::copy(v.begin(), v.end(), out.bytes_.begin());
    return out;
}

template <class To, class From>
To block_cast(const From& from) {
    return To(from.bytes());
}

struct KeyTag {};
struct DigestTag {};
struct NonceTag {};
struct PseudonymTag {};
struct IdentityTag {};
struct AnonTag {};
struct BlindTag {};

using SecretKey128 = Block128<KeyTag>;
using Digest128 = Block128<DigestTag>;
using Nonce128 = Block128<NonceTag>;
using PseudonymId = Block128<PseudonymTag>;  // pID
using UeIdentity = Block128<IdentityTag>;    // real identity ID_i
using AnonId = Block128<AnonTag>;            // rID, lambda, t_rID
using BlindFactor = Block128<BlindTag>;      // bR^I_j

/// lambda = rID xor bR (and back again).
inline AnonId operator^(const AnonId& id, const BlindFactor& blind) {
    AnonId out = id;
    for (std::size_t i = 0; i < AnonId::kSize; ++i) out.bytes()[i] ^= blind.bytes()[i];
    return out;
}

/// Simulated milliseconds since scenario start.
struct Timestamp {
    std::uint64_t ms = 0;

    static constexpr std::size_t kBits = 64;
    std::array<std::uint8_t, 8> encode() const { return be64(ms); }
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

}  // namespace rehand
