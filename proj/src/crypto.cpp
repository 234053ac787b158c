#include "rehand/crypto.hpp"

#include <memory>

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "rehand/errors.hpp"

namespace rehand {

namespace {

struct CtxFree {
    void operator()(EVP_CIPHER_CTX* c) const noexcept { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CtxFree>;

CipherCtx new_ctx() {
    CipherCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    return ctx;
}

void check(int rc, const char* what) {
    if (rc != 1) throw std::runtime_error(std::string("OpenSSL call failed: ") + what);
}

constexpr std::uint8_t kKdfLabel[] = {'F'};

}  // namespace

Bytes encode_fields(std::span<const ByteView> fields) {
    std::size_t total = 0;
    for (const auto& f : fields) {
        if (f.size() > kMaxFieldBytes) {
            throw Error(Errc::EncodingError, "field of " + std::to_string(f.size()) + " bytes exceeds the 2-byte length prefix");
        }
        total += 2 + f.size();
    }
    Bytes out;
    out.reserve(total);
    for (const auto& f : fields) {
        auto len = be16(static_cast<std::uint16_t>(f.size()));
        out.insert(out.end(), len.begin(), len.end());
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

Bytes encode_fields(std::initializer_list<ByteView> fields) {
    return encode_fields(std::span<const ByteView>(fields.begin(), fields.size()));
}

FieldList decode_fields(ByteView encoded) {
    FieldList out;
    std::size_t pos = 0;
    while (pos < encoded.size()) {
        if (encoded.size() - pos < 2) throw Error(Errc::DecodeFailure, "truncated length prefix");
        std::size_t len = read_be16(encoded.subspan(pos, 2));
        pos += 2;
        if (encoded.size() - pos < len) throw Error(Errc::DecodeFailure, "field runs past the end of input");
        out.emplace_back(encoded.begin() + static_cast<std::ptrdiff_t>(pos),
                         encoded.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return out;
}

std::array<std::uint8_t, 32> sha256(ByteView data) {
    std::array<std::uint8_t, 32> out{};
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Digest128 prf_hash(std::span<const ByteView> fields) {
    if (fields.empty()) throw Error(Errc::EncodingError, "prf_hash needs at least one field");
    auto full = sha256(encode_fields(fields));
    Digest128 d;
    std::copy_n(full.begin(), Digest128::kSize, d.bytes().begin());
    return d;
}

Digest128 prf_hash(std::initializer_list<ByteView> fields) {
    return prf_hash(std::span<const ByteView>(fields.begin(), fields.size()));
}

SecretKey128 kdf_next(const SecretKey128& key) {
    return block_cast<SecretKey128>(prf_hash({ByteView(kKdfLabel), key.view()}));
}

Bytes Ciphertext::serialize() const {
    Bytes out;
    out.reserve(kNonceBytes + body.size() + kTagBytes);
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), body.begin(), body.end());
    out.insert(out.end(), tag.begin(), tag.end());
    return out;
}

Ciphertext Ciphertext::parse(ByteView wire) {
    if (wire.size() < kNonceBytes + kTagBytes) throw Error(Errc::DecodeFailure, "ciphertext shorter than nonce and tag");
    Ciphertext ct;
    std::copy_n(wire.begin(), kNonceBytes, ct.nonce.begin());
    ct.body.assign(wire.begin() + kNonceBytes, wire.end() - kTagBytes);
    std::copy(wire.end() - kTagBytes, wire.end(), ct.tag.begin());
    return ct;
}

Ciphertext seal(const SecretKey128& key, std::span<const ByteView> plaintext, RandomSource& rng) {
    Bytes pt = encode_fields(plaintext);
    Ciphertext ct;
    rng.fill(ct.nonce);
    ct.body.resize(pt.size());

    auto ctx = new_ctx();
    check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr), "EncryptInit");
    check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, Ciphertext::kNonceBytes, nullptr), "SET_IVLEN");
    check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes().data(), ct.nonce.data()), "EncryptInit key");
    int len = 0;
    if (!pt.empty()) {
        check(EVP_EncryptUpdate(ctx.get(), ct.body.data(), &len, pt.data(), static_cast<int>(pt.size())), "EncryptUpdate");
    }
    int fin = 0;
    check(EVP_EncryptFinal_ex(ctx.get(), ct.body.data() + len, &fin), "EncryptFinal");
    check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, Ciphertext::kTagBytes, ct.tag.data()), "GET_TAG");
    return ct;
}

Ciphertext seal(const SecretKey128& key, std::initializer_list<ByteView> plaintext, RandomSource& rng) {
    return seal(key, std::span<const ByteView>(plaintext.begin(), plaintext.size()), rng);
}

FieldList open(const SecretKey128& key, const Ciphertext& ct) {
    Bytes pt(ct.body.size());
    auto ctx = new_ctx();
    check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, nullptr, nullptr), "DecryptInit");
    check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, Ciphertext::kNonceBytes, nullptr), "SET_IVLEN");
    check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.bytes().data(), ct.nonce.data()), "DecryptInit key");
    int len = 0;
    if (!ct.body.empty()) {
        check(EVP_DecryptUpdate(ctx.get(), pt.data(), &len, ct.body.data(), static_cast<int>(ct.body.size())), "DecryptUpdate");
    }
    auto tag = ct.tag;
    check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, Ciphertext::kTagBytes, tag.data()), "SET_TAG");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), pt.data() + len, &fin) != 1) {
        throw Error(Errc::AuthFailure, "ciphertext tag mismatch");
    }
    return decode_fields(pt);
}

namespace {

std::array<std::uint8_t, 16> aes_block(const SecretKey128& key, const std::array<std::uint8_t, 16>& in, bool encrypt) {
    auto ctx = new_ctx();
    check(EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.bytes().data(), nullptr, encrypt ? 1 : 0), "CipherInit");
    check(EVP_CIPHER_CTX_set_padding(ctx.get(), 0), "set_padding");
    std::array<std::uint8_t, 16> out{};
    int len = 0;
    check(EVP_CipherUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())), "CipherUpdate");
    int fin = 0;
    check(EVP_CipherFinal_ex(ctx.get(), out.data() + len, &fin), "CipherFinal");
    return out;
}

}  // namespace

PseudonymId pseudonym_encrypt(const SecretKey128& k_h, const AnonId& rid) {
    return PseudonymId(aes_block(k_h, rid.bytes(), true));
}

AnonId pseudonym_decrypt(const SecretKey128& k_h, const PseudonymId& pid) {
    return AnonId(aes_block(k_h, pid.bytes(), false));
}

}  // namespace rehand
