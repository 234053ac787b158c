#include "rehand/accumulator.hpp"

#include <algorithm>
#include <bit>

#include "rehand/crypto.hpp"
#include "rehand/errors.hpp"

namespace rehand {

BitString::BitString(std::size_t nbits, bool value) : nbits_(nbits), bytes_((nbits + 7) / 8, value ? 0xFF : 0x00) {
    if (value && nbits % 8 != 0) {
        bytes_.back() = static_cast<std::uint8_t>(0xFF << (8 - nbits % 8));
    }
}

BitString BitString::from_bytes(ByteView bytes, std::size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8) throw Error(Errc::DecodeFailure, "bit string byte length does not match bit count");
    BitString out;
    out.nbits_ = nbits;
    out.bytes_.assign(bytes.begin(), bytes.end());
    if (nbits % 8 != 0) {
        auto mask = static_cast<std::uint8_t>(0xFF << (8 - nbits % 8));
        if ((out.bytes_.back() & ~mask) != 0) throw Error(Errc::DecodeFailure, "non-zero padding bits");
    }
    return out;
}

bool BitString::get(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("bit index");
    return (bytes_[i / 8] >> (7 - i % 8)) & 1U;
}

void BitString::set(std::size_t i, bool v) {
    if (i >= nbits_) throw std::out_of_range("bit index");
    auto mask = static_cast<std::uint8_t>(1U << (7 - i % 8));
    if (v) {
        bytes_[i / 8] |= mask;
    } else {
        bytes_[i / 8] &= static_cast<std::uint8_t>(~mask);
    }
}

std::size_t BitString::popcount() const noexcept {
    std::size_t n = 0;
    for (auto b : bytes_) n += static_cast<std::size_t>(std::popcount(b));
    return n;
}

BitString BitString::operator&(const BitString& other) const {
    if (nbits_ != other.nbits_) throw Error(Errc::ParamError, "AND of bit strings of different length");
    BitString out = *this;
    for (std::size_t i = 0; i < bytes_.size(); ++i) out.bytes_[i] &= other.bytes_[i];
    return out;
}

std::uint64_t AccParams::capacity() const noexcept {
    return d >= 64 ? UINT64_MAX : (std::uint64_t{1} << d);
}

void AccParams::validate() const {
    if (d == 0 || r == 0) throw Error(Errc::ParamError, "accumulator needs d >= 1 and r >= 1");
    if (d > 0xFFFF) throw Error(Errc::ParamError, "d does not fit the 2-byte wire field");
}

AccValue AccValue::empty(const AccParams& params) {
    params.validate();
    AccValue v;
    v.params_ = params;
    v.bits_ = BitString(params.r, true);
    return v;
}

Bytes AccValue::serialize() const {
    Bytes out;
    auto d = be16(static_cast<std::uint16_t>(params_.d));
    out.insert(out.end(), d.begin(), d.end());
    auto r = be64(params_.r);
    out.insert(out.end(), r.begin() + 4, r.end());
    auto c = be64(count_ > 0xFFFFFFFFULL ? 0xFFFFFFFFULL : count_);
    out.insert(out.end(), c.begin() + 4, c.end());
    out.insert(out.end(), bits_.bytes().begin(), bits_.bytes().end());
    return out;
}

AccValue AccValue::deserialize(ByteView wire) {
    if (wire.size() < 10) throw Error(Errc::DecodeFailure, "accumulator header truncated");
    auto be32 = [&](std::size_t pos) {
        return (std::uint32_t{wire[pos]} << 24) | (std::uint32_t{wire[pos + 1]} << 16) |
               (std::uint32_t{wire[pos + 2]} << 8) | std::uint32_t{wire[pos + 3]};
    };
    AccParams params{read_be16(wire.subspan(0, 2)), be32(2)};
    try {
        params.validate();
    } catch (const Error& e) {
        throw Error(Errc::DecodeFailure, e.what());
    }
    AccValue v;
    v.params_ = params;
    v.count_ = be32(6);
    std::size_t nbytes = (std::size_t{params.r} + 7) / 8;
    if (wire.size() != 10 + nbytes) throw Error(Errc::DecodeFailure, "accumulator bit field has the wrong length");
    v.bits_ = BitString::from_bytes(wire.subspan(10), params.r);
    return v;
}

BitString long_hash(ByteView item, const AccParams& params) {
    params.validate();
    const std::size_t nbits = params.long_bits();
    const std::size_t nbytes = (nbits + 7) / 8;
    Bytes stream;
    stream.reserve(nbytes + 32);
    Bytes input(item.begin(), item.end());
    input.resize(item.size() + 4);
    for (std::uint32_t counter = 0; stream.size() < nbytes; ++counter) {
        auto ctr = be64(counter);
        std::copy(ctr.begin() + 4, ctr.end(), input.end() - 4);
        auto block = sha256(input);
        stream.insert(stream.end(), block.begin(), block.end());
    }
    stream.resize(nbytes);
    if (nbits % 8 != 0) stream.back() &= static_cast<std::uint8_t>(0xFF << (8 - nbits % 8));
    return BitString::from_bytes(stream, nbits);
}

BitString alpha_map(const BitString& longcode, const AccParams& params) {
    params.validate();
    if (longcode.size() != params.long_bits()) {
        throw Error(Errc::ParamError, "long code has " + std::to_string(longcode.size()) + " bits, expected r*d = " +
                                          std::to_string(params.long_bits()));
    }
    BitString out(params.r, false);
    for (std::size_t j = 0; j < params.r; ++j) {
        const std::size_t base = j * params.d;
        bool any = false;
        for (std::size_t b = 0; b < params.d && !any; ++b) any = longcode.get(base + b);
        out.set(j, any);
    }
    return out;
}

AccValue accumulate(const AccValue& acc, ByteView item) {
    if (item.empty()) throw Error(Errc::ParamError, "cannot accumulate an empty item");
    AccValue out = acc;
    out.bits_ = acc.bits_ & alpha_map(long_hash(item, acc.params_), acc.params_);
    out.count_ = acc.count_ + 1;
    return out;
}

bool contains(const AccValue& acc, ByteView item) {
    auto masked = acc.bits() & alpha_map(long_hash(item, acc.params()), acc.params());
    return masked == acc.bits();
}

double fp_rate_estimate(const AccParams& params, std::uint64_t members, std::uint64_t trials, RandomSource& rng) {
    if (trials < 1000) throw Error(Errc::ParamError, "fp_rate_estimate needs at least 1000 trials");
    // The rate is an average over member sets, so probes are spread across
    // up to 1000 freshly drawn accumulators rather than a single one.
    const std::uint64_t groups = std::min<std::uint64_t>(trials, 1000);
    std::array<std::uint8_t, 16> item{};
    std::uint64_t hits = 0;
    for (std::uint64_t g = 0; g < groups; ++g) {
        AccValue acc = AccValue::empty(params);
        for (std::uint64_t i = 0; i < members; ++i) {
            rng.fill(item);
            acc = accumulate(acc, item);
        }
        const std::uint64_t probes = trials / groups + (g < trials % groups ? 1 : 0);
        for (std::uint64_t t = 0; t < probes; ++t) {
            rng.fill(item);
            if (contains(acc, item)) ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace rehand
