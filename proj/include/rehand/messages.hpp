/**
 * @file messages.hpp
 * @brief Protocol flows and their wire encoding.
 *
 * Wire form: one type byte, then the fields in declaration order using the
 * canonical 2-byte length-prefixed framing. Byte layouts are listed in
 * docs/wire-format.md.
 */
#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

#include "rehand/accumulator.hpp"
#include "rehand/bytes.hpp"
#include "rehand/crypto.hpp"
#include "rehand/errors.hpp"

namespace rehand {

using RegionId = std::uint32_t;

enum class MsgType : std::uint8_t {
    InitialRequest = 1,
    InitialResponseCore = 2,
    InitialResponseEnb = 3,
    HenbKeyDelivery = 4,
    InitialResponseHenb = 5,
    FastRequest = 6,
    FastChallenge = 7,
    FastConfirm = 8,
    RListPush = 9,
    Reject = 10,
};

/// UE -> HeNB -> eNB -> MME -> HSS: {pID, C_1 = E_{K_i}(pID, d)}
struct InitialRequest {
    PseudonymId pid;
    Ciphertext c1;
};

/// HSS -> MME: {C_2, K_M}
struct InitialResponseCore {
    Ciphertext c2;
    SecretKey128 k_mme;
};

/// MME -> eNB: {C_2, K_eN}
struct InitialResponseEnb {
    Ciphertext c2;
    SecretKey128 k_enb;
};

/// eNB -> HeNB over X2: {C_2, K_He}
struct HenbKeyDelivery {
    Ciphertext c2;
    SecretKey128 k_henb;
};

/// HeNB -> UE: {C_2}
struct InitialResponseHenb {
    Ciphertext c2;
};

/// UE -> HeNB: {TID = (lambda, I), r_u, T_ex}
struct FastRequest {
    AnonId lambda;
    std::uint16_t index = 0;
    Nonce128 r_u;
    Timestamp expiry;
};

/// HeNB -> UE: {delta, r_h, C = E_{D_ij}(lambda', I')}
struct FastChallenge {
    Digest128 delta;
    Nonce128 r_h;
    Ciphertext c;
};

/// UE -> HeNB: {delta'}
struct FastConfirm {
    Digest128 delta_prime;
};

/// HSS -> region: {R, sigma = H(GK_j, R)}
struct RListPush {
    AccValue list;
    Digest128 sigma;
};

/// Typed rejection, code only.
struct Reject {
    Errc code = Errc::AuthFailure;
};

using Message = std::variant<InitialRequest, InitialResponseCore, InitialResponseEnb, HenbKeyDelivery,
                             InitialResponseHenb, FastRequest, FastChallenge, FastConfirm, RListPush, Reject>;

MsgType type_of(const Message& msg);
std::string_view type_name(MsgType type);
/// Throws Error(ParamError) on an unknown name.
MsgType type_from_name(std::string_view name);

Bytes encode(const Message& msg);
/// Throws Error(DecodeFailure) on an unknown type byte, a wrong field count
/// or a field of the wrong width.
Message decode(ByteView wire);

/// Sum of the field lengths in bits, without the type byte and length
/// prefixes: what the cost accounting charges for a flow.
std::size_t payload_bits(const Message& msg);

}  // namespace rehand
