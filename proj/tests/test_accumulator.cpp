#include <doctest.h>

#include <cmath>

#include "rehand/accumulator.hpp"
#include "rehand/errors.hpp"
#include "support.hpp"

using namespace rehand;
using testsupport::fixture;
using testsupport::hex_list;

namespace {

AccParams params_of(const std::vector<std::string>& row) {
    return AccParams{static_cast<std::uint32_t>(std::stoul(row[1])), static_cast<std::uint32_t>(std::stoul(row[2]))};
}

Bytes item(RandomSource& rng) {
    Bytes b(16);
    rng.fill(b);
    return b;
}

}  // namespace

TEST_CASE("long hash, alpha map and accumulation match the reference") {
    int rows = 0;
    for (const auto& row : fixture("accumulator_vectors.txt")) {
        const AccParams p = params_of(row);
        CAPTURE(row[0]);
        CAPTURE(p.d);
        CAPTURE(p.r);
        if (row[0] == "long") {
            const auto lh = long_hash(from_hex(row[3]), p);
            CHECK(lh.size() == p.long_bits());
            CHECK(to_hex(lh.bytes()) == row[4]);
        } else if (row[0] == "alpha") {
            const auto a = alpha_map(long_hash(from_hex(row[3]), p), p);
            CHECK(a.size() == p.r);
            CHECK(to_hex(a.bytes()) == row[4]);
        } else if (row[0] == "acc") {
            AccValue acc = AccValue::empty(p);
            for (const auto& it : hex_list(row[3])) acc = accumulate(acc, it);
            CHECK(to_hex(acc.bits().bytes()) == row[4]);
            CHECK(to_hex(acc.serialize()) == row[5]);
            CHECK(AccValue::deserialize(from_hex(row[5])) == acc);
            CHECK(AccValue::deserialize(from_hex(row[5])).count() == 3);
        }
        ++rows;
    }
    CHECK(rows == 20);
}

TEST_CASE("membership has no false negatives and order does not matter") {
    RandomSource rng(99);
    const AccParams p{6, 1536};
    for (int t = 0; t < 50; ++t) {
        std::vector<Bytes> items;
        for (int i = 0; i < 10; ++i) items.push_back(item(rng));
        AccValue fwd = AccValue::empty(p), rev = AccValue::empty(p);
        for (const auto& i : items) fwd = accumulate(fwd, i);
        for (auto it = items.rbegin(); it != items.rend(); ++it) rev = accumulate(rev, *it);
        CHECK(fwd == rev);
        for (const auto& i : items) CHECK(contains(fwd, i));
        // idempotent
        CHECK(accumulate(fwd, items.front()) == fwd);
    }
}

TEST_CASE("empty accumulator is all ones") {
    const AccParams p{5, 20};
    const auto e = AccValue::empty(p);
    CHECK(e.bits().popcount() == 20);
    CHECK(e.count() == 0);
    CHECK(e.serialize().size() == 2 + 4 + 4 + 3);
    CHECK(AccValue::deserialize(e.serialize()) == e);
}

TEST_CASE("capacity flag") {
    const AccParams p{2, 64};
    CHECK(p.capacity() == 4);
    CHECK(AccParams{64, 1}.capacity() == UINT64_MAX);
    RandomSource rng(1);
    AccValue acc = AccValue::empty(p);
    for (int i = 0; i < 4; ++i) acc = accumulate(acc, item(rng));
    CHECK_FALSE(acc.capacity_exceeded());
    acc = accumulate(acc, item(rng));
    CHECK(acc.capacity_exceeded());
}

TEST_CASE("parameter and decode errors") {
    CHECK_THROWS_AS(AccParams({0, 8}).validate(), Error);
    CHECK_THROWS_AS(AccParams({4, 0}).validate(), Error);
    CHECK_THROWS_AS(AccParams({0x10000, 1}).validate(), Error);
    const AccParams p{3, 13};
    CHECK_THROWS_AS(alpha_map(BitString(38), p), Error);
    CHECK_THROWS_AS(accumulate(AccValue::empty(p), Bytes{}), Error);

    Bytes wire = AccValue::empty(p).serialize();
    try {
        AccValue::deserialize(ByteView(wire).first(wire.size() - 1));
        FAIL("expected DecodeFailure");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DecodeFailure);
    }
    Bytes longer = wire;
    longer.push_back(0);
    CHECK_THROWS_AS(AccValue::deserialize(longer), Error);
    // a set padding bit is not a canonical encoding
    Bytes pad = wire;
    pad.back() = 0xFF;
    CHECK_THROWS_AS(AccValue::deserialize(pad), Error);
}

TEST_CASE("bit strings") {
    BitString b(10);
    b.set(0, true);
    b.set(9, true);
    CHECK(b.get(0));
    CHECK(b.get(9));
    CHECK_FALSE(b.get(5));
    CHECK(b.popcount() == 2);
    CHECK(to_hex(b.bytes()) == "8040");
    CHECK(BitString::from_bytes(b.bytes(), 10) == b);
    CHECK_THROWS(b.get(10));
    CHECK_THROWS(b & BitString(11));
}

TEST_CASE("false-positive estimate tracks the analytic rate") {
    // Each alpha bit is 0 with probability 2^-d; an accumulator of m members
    // keeps a bit at 1 with probability (1-2^-d)^m. A non-member passes when
    // none of its zeros lands on a one.
    const AccParams p{4, 64};
    const double q = std::pow(1.0 - 1.0 / 16, 10);
    const double analytic = std::pow(1.0 - q / 16, 64);
    RandomSource rng(5);
    const double est = fp_rate_estimate(p, 10, 20000, rng);
    CHECK(est == doctest::Approx(analytic).epsilon(0.1));
    CHECK_THROWS(fp_rate_estimate(p, 10, 10, rng));
}

TEST_CASE("estimator on the one-bit model") {
    // d = r = 1: the member bit is 0 half the time (every probe passes),
    // otherwise a probe passes iff its own bit is 1.
    RandomSource rng(17);
    CHECK(fp_rate_estimate({1, 1}, 1, 20000, rng) == doctest::Approx(0.75).epsilon(0.02 / 0.75));
}

TEST_CASE("empty list matches only all-ones patterns") {
    RandomSource rng(23);
    CHECK(fp_rate_estimate({2, 256}, 0, 2000, rng) == 0.0);
}

TEST_CASE("more members never lower the estimate") {
    RandomSource a(31), b(31);
    const AccParams p{3, 32};
    const double m4 = fp_rate_estimate(p, 4, 20000, a);
    const double m8 = fp_rate_estimate(p, 8, 20000, b);
    CHECK(m8 >= m4);
}
