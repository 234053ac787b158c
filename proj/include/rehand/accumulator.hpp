/**
 * @file accumulator.hpp
 * @brief Nyberg's fast one-way accumulator over r-bit AND digests.
 *
 * An item is hashed to an l = r*d bit long code, each d-bit substring is
 * collapsed to one bit (0 iff the substring is all zeros), and the r-bit
 * result is ANDed into the accumulated value. The empty accumulator is the
 * all-ones string, the identity of AND.
 */
#pragma once

#include <cstdint>
#include <vector>

#include "rehand/bytes.hpp"
#include "rehand/random.hpp"

namespace rehand {

/// Packed bit string, most significant bit first within each byte.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t nbits, bool value = false);
    static BitString from_bytes(ByteView bytes, std::size_t nbits);

    std::size_t size() const noexcept { return nbits_; }
    bool get(std::size_t i) const;
    void set(std::size_t i, bool v);
    std::size_t popcount() const noexcept;
    const Bytes& bytes() const noexcept { return bytes_; }

    BitString operator&(const BitString& other) const;
    friend bool operator==(const BitString&, const BitString&) = default;

private:
    std::size_t nbits_ = 0;
    Bytes bytes_;  // unused tail bits are kept at zero
};

struct AccParams {
    std::uint32_t d = 6;     // bits per substring
    std::uint32_t r = 1536;  // substrings, i.e. accumulator width

    std::size_t long_bits() const noexcept { return std::size_t{r} * d; }
    /// N = 2^d, saturating for d >= 64.
    std::uint64_t capacity() const noexcept;
    /// Throws Error(ParamError) for d == 0, r == 0 or d > 0xFFFF.
    void validate() const;

    friend bool operator==(const AccParams&, const AccParams&) = default;
};

class AccValue {
public:
    /// The empty accumulator: all ones.
    static AccValue empty(const AccParams& params);

    const AccParams& params() const noexcept { return params_; }
    const BitString& bits() const noexcept { return bits_; }
    std::uint64_t count() const noexcept { return count_; }
    /// More items absorbed than the N = 2^d design bound; membership
    /// answers remain sound but the false-positive rate degrades.
    bool capacity_exceeded() const noexcept { return count_ > params_.capacity(); }

    /// 2-byte d, 4-byte r, 4-byte count, then ceil(r/8) bytes of bits, big-endian.
    Bytes serialize() const;
    /// Throws Error(DecodeFailure) on a malformed buffer.
    static AccValue deserialize(ByteView wire);

    /// Equality over (params, bits); the count is bookkeeping only.
    friend bool operator==(const AccValue& a, const AccValue& b) {
        return a.params_ == b.params_ && a.bits_ == b.bits_;
    }

private:
    friend AccValue accumulate(const AccValue&, ByteView);

    AccParams params_;
    BitString bits_;
    std::uint64_t count_ = 0;
};

/// h: SHA-256 over item || be32(counter) for counter = 0, 1, ... concatenated
/// and truncated to r*d bits.
BitString long_hash(ByteView item, const AccParams& params);

/// alpha: bit j is 0 iff the j-th d-bit substring is all zeros.
/// Throws Error(ParamError) if longcode is not r*d bits.
BitString alpha_map(const BitString& longcode, const AccParams& params);

/// H^Nyb(acc, item) = acc AND alpha(h(item)). Throws Error(ParamError) for an empty item.
AccValue accumulate(const AccValue& acc, ByteView item);

/// True iff acc AND alpha(h(item)) == acc. Never false for an accumulated item.
bool contains(const AccValue& acc, ByteView item);

/// Monte-Carlo estimate of Pr[contains | non-member] for an accumulator
/// holding m random 16-byte members. trials must be at least 1000.
double fp_rate_estimate(const AccParams& params, std::uint64_t members, std::uint64_t trials, RandomSource& rng);

}  // namespace rehand
