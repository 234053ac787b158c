/**
 * @file crypto.hpp
 * @brief Hash, key derivation, authenticated encryption and the pseudonym
 *        permutation used by every protocol phase.
 *
 * Multi-field inputs are framed canonically: each field is a 2-byte
 * big-endian length followed by its bytes, fields concatenated in protocol
 * order. Hash outputs are the first 128 bits of SHA-256 over that framing.
 */
#pragma once

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

#include "rehand/bytes.hpp"
#include "rehand/random.hpp"

namespace rehand {

inline constexpr std::size_t kMaxFieldBytes = 0xFFFF;

using FieldList = std::vector<Bytes>;

/// Throws Error(EncodingError) when a field exceeds kMaxFieldBytes.
Bytes encode_fields(std::span<const ByteView> fields);
Bytes encode_fields(std::initializer_list<ByteView> fields);
/// Throws Error(DecodeFailure) on truncated or trailing framing.
FieldList decode_fields(ByteView encoded);

std::array<std::uint8_t, 32> sha256(ByteView data);

/// H: truncated SHA-256 over the canonical framing. The list must be non-empty.
Digest128 prf_hash(std::span<const ByteView> fields);
Digest128 prf_hash(std::initializer_list<ByteView> fields);

/// F: prf_hash with the "F" label prepended.
SecretKey128 kdf_next(const SecretKey128& key);

/// Nonce-based AE output: 96-bit nonce, body, 128-bit tag.
struct Ciphertext {
    static constexpr std::size_t kNonceBytes = 12;
    static constexpr std::size_t kTagBytes = 16;

    std::array<std::uint8_t, kNonceBytes> nonce{};
    Bytes body;
    std::array<std::uint8_t, kTagBytes> tag{};

    /// nonce || body || tag
    Bytes serialize() const;
    /// Throws Error(DecodeFailure) if shorter than nonce + tag.
    static Ciphertext parse(ByteView wire);
    std::size_t size_bits() const { return 8 * (kNonceBytes + body.size() + kTagBytes); }

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

/// E_key(fields): AES-128-GCM over the canonical framing, fresh nonce per call.
Ciphertext seal(const SecretKey128& key, std::span<const ByteView> plaintext, RandomSource& rng);
Ciphertext seal(const SecretKey128& key, std::initializer_list<ByteView> plaintext, RandomSource& rng);

/// D_key(ct). Throws Error(AuthFailure) on a tag mismatch and
/// Error(DecodeFailure) if the authenticated plaintext is not valid framing.
FieldList open(const SecretKey128& key, const Ciphertext& ct);

/// pID = E_{K_H}(rID): single-block AES-128, a keyed permutation on 128 bits.
PseudonymId pseudonym_encrypt(const SecretKey128& k_h, const AnonId& rid);
AnonId pseudonym_decrypt(const SecretKey128& k_h, const PseudonymId& pid);

}  // namespace rehand
