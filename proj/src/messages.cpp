#include "rehand/messages.hpp"

#include <array>

namespace rehand {

namespace {

constexpr std::array<std::pair<MsgType, std::string_view>, 10> kNames{{
    {MsgType::InitialRequest, "InitialRequest"},
    {MsgType::InitialResponseCore, "InitialResponseCore"},
    {MsgType::InitialResponseEnb, "InitialResponseEnb"},
    {MsgType::HenbKeyDelivery, "HenbKeyDelivery"},
    {MsgType::InitialResponseHenb, "InitialResponseHenb"},
    {MsgType::FastRequest, "FastRequest"},
    {MsgType::FastChallenge, "FastChallenge"},
    {MsgType::FastConfirm, "FastConfirm"},
    {MsgType::RListPush, "RListPush"},
    {MsgType::Reject, "Reject"},
}};

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Owned field storage for one message; views into it are handed to encode_fields.
std::vector<Bytes> fields_of(const Message& msg) {
    auto blk = [](const auto& b) { return Bytes(b.view().begin(), b.view().end()); };
    auto arr = [](const auto& a) { return Bytes(a.begin(), a.end()); };
    return std::visit(
        Overloaded{
            [&](const InitialRequest& m) { return std::vector<Bytes>{blk(m.pid), m.c1.serialize()}; },
            [&](const InitialResponseCore& m) { return std::vector<Bytes>{m.c2.serialize(), blk(m.k_mme)}; },
            [&](const InitialResponseEnb& m) { return std::vector<Bytes>{m.c2.serialize(), blk(m.k_enb)}; },
            [&](const HenbKeyDelivery& m) { return std::vector<Bytes>{m.c2.serialize(), blk(m.k_henb)}; },
            [&](const InitialResponseHenb& m) { return std::vector<Bytes>{m.c2.serialize()}; },
            [&](const FastRequest& m) {
                return std::vector<Bytes>{blk(m.lambda), arr(be16(m.index)), blk(m.r_u), arr(m.expiry.encode())};
            },
            [&](const FastChallenge& m) { return std::vector<Bytes>{blk(m.delta), blk(m.r_h), m.c.serialize()}; },
            [&](const FastConfirm& m) { return std::vector<Bytes>{blk(m.delta_prime)}; },
            [&](const RListPush& m) { return std::vector<Bytes>{m.list.serialize(), blk(m.sigma)}; },
            [&](const Reject& m) { return std::vector<Bytes>{Bytes{static_cast<std::uint8_t>(m.code)}}; },
        },
        msg);
}

void expect_count(const FieldList& f, std::size_t n, MsgType t) {
    if (f.size() != n) {
        throw Error(Errc::DecodeFailure, std::string(type_name(t)) + " expects " + std::to_string(n) + " fields, got " +
                                             std::to_string(f.size()));
    }
}

template <class B>
B block(const Bytes& field) {
    if (field.size() != B::kSize) throw Error(Errc::DecodeFailure, "128-bit field has " + std::to_string(field.size()) + " bytes");
    return B::from_view(field);
}

std::uint16_t u16(const Bytes& field) {
    if (field.size() != 2) throw Error(Errc::DecodeFailure, "index field must be 2 bytes");
    return read_be16(field);
}

Timestamp ts(const Bytes& field) {
    if (field.size() != 8) throw Error(Errc::DecodeFailure, "timestamp field must be 8 bytes");
    return Timestamp{read_be64(field)};
}

}  // namespace

MsgType type_of(const Message& msg) {
    return static_cast<MsgType>(msg.index() + 1);
}

std::string_view type_name(MsgType type) {
    for (const auto& [t, name] : kNames) {
        if (t == type) return name;
    }
    return "Unknown";
}

MsgType type_from_name(std::string_view name) {
    for (const auto& [t, n] : kNames) {
        if (n == name) return t;
    }
    throw Error(Errc::ParamError, "unknown message type '" + std::string(name) + "'");
}

Bytes encode(const Message& msg) {
    auto owned = fields_of(msg);
    std::vector<ByteView> views(owned.begin(), owned.end());
    Bytes body = encode_fields(views);
    Bytes out;
    out.reserve(body.size() + 1);
    out.push_back(static_cast<std::uint8_t>(type_of(msg)));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

Message decode(ByteView wire) {
    if (wire.empty()) throw Error(Errc::DecodeFailure, "empty message");
    const auto tag = wire[0];
    if (tag < 1 || tag > kNames.size()) throw Error(Errc::DecodeFailure, "unknown message type byte " + std::to_string(tag));
    const auto type = static_cast<MsgType>(tag);
    FieldList f = decode_fields(wire.subspan(1));
    switch (type) {
        case MsgType::InitialRequest:
            expect_count(f, 2, type);
            return InitialRequest{block<PseudonymId>(f[0]), Ciphertext::parse(f[1])};
        case MsgType::InitialResponseCore:
            expect_count(f, 2, type);
            return InitialResponseCore{Ciphertext::parse(f[0]), block<SecretKey128>(f[1])};
        case MsgType::InitialResponseEnb:
            expect_count(f, 2, type);
            return InitialResponseEnb{Ciphertext::parse(f[0]), block<SecretKey128>(f[1])};
        case MsgType::HenbKeyDelivery:
            expect_count(f, 2, type);
            return HenbKeyDelivery{Ciphertext::parse(f[0]), block<SecretKey128>(f[1])};
        case MsgType::InitialResponseHenb:
            expect_count(f, 1, type);
            return InitialResponseHenb{Ciphertext::parse(f[0])};
        case MsgType::FastRequest:
            expect_count(f, 4, type);
            return FastRequest{block<AnonId>(f[0]), u16(f[1]), block<Nonce128>(f[2]), ts(f[3])};
        case MsgType::FastChallenge:
            expect_count(f, 3, type);
            return FastChallenge{block<Digest128>(f[0]), block<Nonce128>(f[1]), Ciphertext::parse(f[2])};
        case MsgType::FastConfirm:
            expect_count(f, 1, type);
            return FastConfirm{block<Digest128>(f[0])};
        case MsgType::RListPush:
            expect_count(f, 2, type);
            return RListPush{AccValue::deserialize(f[0]), block<Digest128>(f[1])};
        case MsgType::Reject: {
            expect_count(f, 1, type);
            if (f[0].size() != 1 || f[0][0] > static_cast<std::uint8_t>(Errc::ConfigError)) {
                throw Error(Errc::DecodeFailure, "bad reject code");
            }
            return Reject{static_cast<Errc>(f[0][0])};
        }
    }
    throw Error(Errc::DecodeFailure, "unhandled message type");
}

std::size_t payload_bits(const Message& msg) {
    std::size_t bits = 0;
    for (const auto& f : fields_of(msg)) bits += 8 * f.size();
    return bits;
}

}  // namespace rehand
