#include <doctest.h>

#include <sstream>

#include "rehand/anonymity.hpp"
#include "rehand/errors.hpp"

using namespace rehand;
using namespace rehand::anon;

namespace {

AnonId nibble(std::uint8_t v) {
    AnonId a;
    a.bytes()[15] = v & 0x0F;
    return a;
}

struct Toy {
    std::size_t b, k;
    std::vector<std::pair<std::size_t, std::size_t>> rows;  // (ue, index)
};

// Plants random 4-bit secrets, derives the right-hand sides, then counts by
// brute force how many secret vectors satisfy every row.
std::pair<XorSystem, std::uint64_t> brute(const Toy& t, RandomSource& rng) {
    const std::size_t n = t.b + t.k;
    std::vector<std::uint8_t> secret(n);
    for (auto& s : secret) s = static_cast<std::uint8_t>(rng.uniform_index(16));
    XorSystem sys(t.b, t.k);
    std::vector<std::uint8_t> rhs;
    for (auto [ue, idx] : t.rows) {
        rhs.push_back(secret[ue] ^ secret[t.b + idx - 1]);
        sys.add_row(ue, idx, nibble(rhs.back()));
    }
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 16;
    std::uint64_t count = 0;
    std::vector<std::uint8_t> x(n);
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (auto& v : x) {
            v = c & 0x0F;
            c >>= 4;
        }
        bool ok = true;
        for (std::size_t r = 0; r < t.rows.size() && ok; ++r) {
            ok = (x[t.rows[r].first] ^ x[t.b + t.rows[r].second - 1]) == rhs[r];
        }
        count += ok;
    }
    return {std::move(sys), count};
}

std::uint64_t pow16(std::size_t e) {
    std::uint64_t v = 1;
    while (e--) v *= 16;
    return v;
}

}  // namespace

TEST_CASE("system shape") {
    XorSystem one(1, 2);
    one.add_row(0, 1, nibble(3));
    CHECK(one.rows() == 1);
    CHECK(one.columns() == 3);
    CHECK(one.coefficient(0, 0));
    CHECK(one.coefficient(0, 1));
    CHECK_FALSE(one.coefficient(0, 2));
    CHECK(solution_space_dim(one) == 2);

    XorSystem s(2, 3);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t i = 1; i <= 2; ++i) s.add_row(u, i, nibble(static_cast<std::uint8_t>(u + i)));
    CHECK(s.rows() == 4);
    CHECK(s.columns() == 5);
    CHECK_THROWS_AS(s.add_row(2, 1, {}), Error);
    CHECK_THROWS_AS(s.add_row(0, 0, {}), Error);
    CHECK_THROWS_AS(s.add_row(0, 4, {}), Error);
}

TEST_CASE("solution count matches 16^dim on 4-bit toys") {
    RandomSource rng(404);
    const std::vector<Toy> toys = {
        {1, 1, {{0, 1}}},
        {1, 2, {{0, 1}}},
        {2, 1, {{0, 1}, {0, 1}, {1, 1}, {1, 1}}},   // every UE reuses bR_1
        {2, 2, {{0, 1}, {0, 2}, {1, 1}, {1, 2}}},   // closes a cycle
        {2, 3, {{0, 1}, {0, 2}, {1, 3}, {1, 1}}},
        {3, 2, {{0, 1}, {1, 2}, {2, 1}}},
        {2, 2, {{0, 1}, {1, 2}}},                    // two components
    };
    for (const auto& t : toys) {
        auto [sys, count] = brute(t, rng);
        const std::size_t dim = solution_space_dim(sys);
        CAPTURE(t.b);
        CAPTURE(t.k);
        CHECK(count == pow16(dim));
        CHECK(dim >= 1);
        const auto red = sys.reduce();
        CHECK(red.rank <= std::min(sys.rows(), sys.columns()));
    }
}

TEST_CASE("inconsistent right-hand sides are reported") {
    XorSystem s(1, 1);
    s.add_row(0, 1, nibble(1));
    s.add_row(0, 1, nibble(2));
    CHECK_FALSE(s.reduce().consistent);
    try {
        solution_space_dim(s);
        FAIL("expected Inconsistent");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::Inconsistent);
    }
}

TEST_CASE("simulator-generated instances") {
    RandomSource rng(9);
    SUBCASE("b=2, a=2, k=3 satisfies the bound") {
        const auto obs = generate_observations(2, 2, 3, rng);
        CHECK(obs.observations.size() == 4);
        CHECK(obs.sessions_per_ue() == 2);
        CHECK(obs.lemma_bound() == 2);
        CHECK(is_unlinkable(obs));
        const auto v = analyse(obs, 7);
        CHECK(v.bound_holds);
        CHECK(v.unlinkable);
        CHECK(v.dim >= 1);
        CHECK(v.region == 7);
        std::ostringstream os;
        write_verdict(os, v);
        CHECK(os.str().find("region=7") != std::string::npos);
        CHECK(os.str().find("verdict=") != std::string::npos);
    }
    SUBCASE("adding observations never increases dim") {
        const auto obs = generate_observations(4, 3, 5, rng);
        const auto labels = true_assignment(obs);
        XorSystem sys(obs.b, obs.k);
        std::size_t prev = obs.b + obs.k;
        for (std::size_t i = 0; i < obs.observations.size(); ++i) {
            sys.add_row(labels[i], obs.observations[i].index, obs.observations[i].lambda);
            const std::size_t d = solution_space_dim(sys);
            CHECK(d <= prev);
            CHECK(sys.reduce().rank <= std::min(sys.rows(), sys.columns()));
            prev = d;
        }
        CHECK(build_system(obs, labels).rows() == obs.observations.size());
    }
    SUBCASE("validation") {
        ObservationSet bad{{}, 1, 0};
        CHECK_THROWS_AS(is_unlinkable(bad), Error);
        auto obs = generate_observations(1, 1, 2, rng);
        obs.observations[0].index = 3;
        CHECK_THROWS_AS(obs.validate(), Error);
        CHECK_THROWS_AS(build_system(generate_observations(1, 2, 2, rng), {0}), Error);
    }
}
