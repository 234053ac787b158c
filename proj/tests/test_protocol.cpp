#include <doctest.h>

#include "rehand/protocol.hpp"
#include "support.hpp"

using namespace rehand;
using testsupport::block;
using testsupport::fixture;
using testsupport::hex_list;

namespace {

void expect_code(Errc code, auto&& fn) {
    try {
        fn();
        FAIL("expected " << errc_name(code));
    } catch (const Error& e) {
        CHECK(errc_name(e.code()) == errc_name(code));
    }
}

struct World {
    ProtocolParams params;
    RandomSource rng{2024};
    Hss hss{params, rng};
    const RegionProvision& region;
    Mme mme;
    Enb enb{1};
    Henb henb;
    Ue ue;
    SessionId session = 1;

    explicit World(std::uint16_t k = 8)
        : region(hss.provision_region(1, k, rng)),
          henb(region, params),
          ue(hss.register_ue(rng.block<UeIdentity>(), rng)) {}

    void initial(Timestamp now) {
        auto req = ue.begin_initial(rng);
        auto core = hss.handle_initial(req, 1, now, rng);
        auto relayed = relay_key_chain(core, mme, enb, henb, session++);
        ue.complete_initial(relayed.to_ue, 1, now);
    }

    SecretKey128 fast(Timestamp now) {
        auto req = ue.begin_fast(rng);
        auto ch = henb.handle_fast(req, now, rng);
        auto conf = ue.handle_challenge(ch.challenge);
        return henb.confirm(ch.session, conf, session++);
    }
};

}  // namespace

TEST_CASE("derivations match the reference") {
    int n = 0;
    for (const auto& row : fixture("protocol_vectors.txt")) {
        if (row[0] == "chain") {
            const auto ck = derive_ck(block<Nonce128>(row[1]), block<PseudonymId>(row[2]));
            CHECK(ck.hex() == row[3]);
            const auto chain = KeyChain::from_ck(ck);
            CHECK(chain.k_mme.hex() == row[4]);
            CHECK(chain.k_enb.hex() == row[5]);
            CHECK(chain.k_henb.hex() == row[6]);
        } else if (row[0] == "dij") {
            const auto d = derive_region_secret(block<SecretKey128>(row[1]), block<AnonId>(row[2]),
                                                Timestamp{std::stoull(row[3])});
            CHECK(d.hex() == row[4]);
        } else if (row[0] == "fast") {
            const auto dij = block<SecretKey128>(row[1]);
            const auto ru = block<Nonce128>(row[2]), rh = block<Nonce128>(row[3]);
            const auto key = derive_fast_key(dij, ru, rh);
            CHECK(key.hex() == row[4]);
            CHECK(derive_delta(dij, ru, rh, key).hex() == row[5]);
            CHECK(derive_delta_prime(key, rh).hex() == row[6]);
        } else if (row[0] == "sigma") {
            AccValue acc = AccValue::empty({6, 1536});
            for (const auto& it : hex_list(row[2])) acc = accumulate(acc, it);
            CHECK(list_mac(block<SecretKey128>(row[1]), acc).hex() == row[3]);
        }
        ++n;
    }
    CHECK(n == 11);
}

TEST_CASE("initial handover distributes the key chain one hop at a time") {
    World w;
    const auto old_pid = w.ue.pid();
    w.initial(Timestamp{1000});
    REQUIRE(w.ue.keychain());
    REQUIRE(w.ue.warrant());
    const auto& chain = *w.ue.keychain();
    CHECK(w.mme.key(1) == chain.k_mme);
    CHECK(w.enb.key(1) == chain.k_enb);
    CHECK(w.henb.key(1) == chain.k_henb);
    CHECK(KeyChain::from_ck(chain.ck).k_henb == chain.k_henb);
    CHECK_FALSE(w.ue.pid() == old_pid);
    CHECK(w.hss.find_user(w.ue.pid()) != nullptr);
    CHECK(w.hss.find_user(old_pid) == nullptr);

    const auto& warrant = *w.ue.warrant();
    CHECK(warrant.expiry.ms == 1000 + w.params.warrant_lifetime_ms);
    CHECK(warrant.index >= 1);
    CHECK(warrant.index <= 8);
    const auto ledger = w.hss.ledger(w.ue.identity());
    REQUIRE(ledger.size() == 1);
    CHECK(ledger[0].region_secret == warrant.region_secret);
    CHECK(ledger[0].ck == chain.ck);
}

TEST_CASE("fast handover agrees on a fresh key and rotates the TID") {
    World w;
    w.initial(Timestamp{0});
    const auto before = *w.ue.warrant();
    const auto k1 = w.fast(Timestamp{10'000});
    CHECK(w.ue.fast_session_key() == k1);
    const auto after = *w.ue.warrant();
    CHECK_FALSE(after.lambda == before.lambda);
    CHECK(after.index != before.index);
    CHECK(after.region_secret == before.region_secret);
    // same rID under a different blind factor
    CHECK((after.lambda ^ w.region.blind(after.index)) == (before.lambda ^ w.region.blind(before.index)));
    const auto k2 = w.fast(Timestamp{20'000});
    CHECK_FALSE(k1 == k2);
    REQUIRE(w.ue.last_fast_transcript());
    CHECK(w.ue.last_fast_transcript()->lambda == after.lambda);
}

TEST_CASE("a single blind factor keeps the index") {
    World w(1);
    w.initial(Timestamp{0});
    w.fast(Timestamp{1});
    CHECK(w.ue.warrant()->index == 1);
}

TEST_CASE("registration and provisioning errors") {
    World w;
    const auto id = w.ue.identity();
    expect_code(Errc::AlreadyRegistered, [&] { w.hss.register_ue(id, w.rng); });
    expect_code(Errc::ParamError, [&] { w.hss.provision_region(1, 4, w.rng); });
    expect_code(Errc::ParamError, [&] { w.hss.provision_region(2, 0, w.rng); });
    const auto& r = w.hss.provision_region(3, 50, w.rng);
    std::set<std::string> seen;
    for (const auto& b : r.blind_factors) seen.insert(b.hex());
    CHECK(seen.size() == 50);
    expect_code(Errc::MalformedRequest, [&] { r.blind(0); });
    expect_code(Errc::MalformedRequest, [&] { r.blind(51); });
}

TEST_CASE("HSS rejects bad initial requests without changing state") {
    World w;
    auto req = w.ue.begin_initial(w.rng);
    const auto users = w.hss.user_count();

    SUBCASE("unknown pID") {
        auto bad = req;
        bad.pid = w.rng.block<PseudonymId>();
        expect_code(Errc::UnknownUser, [&] { w.hss.handle_initial(bad, 1, {}, w.rng); });
    }
    SUBCASE("unknown region") {
        expect_code(Errc::ParamError, [&] { w.hss.handle_initial(req, 9, {}, w.rng); });
    }
    SUBCASE("tampered C_1") {
        auto bad = req;
        bad.c1.body[0] ^= 1;
        expect_code(Errc::AuthFailure, [&] { w.hss.handle_initial(bad, 1, {}, w.rng); });
    }
    SUBCASE("inner pID differs") {
        auto bad = req;
        const auto other = w.rng.block<PseudonymId>();
        const auto d = w.rng.block<Nonce128>();
        bad.c1 = seal(w.ue.long_term_key(), {other.view(), d.view()}, w.rng);
        expect_code(Errc::IntegrityFailure, [&] { w.hss.handle_initial(bad, 1, {}, w.rng); });
    }
    CHECK(w.hss.user_count() == users);
    CHECK(w.hss.find_user(w.ue.pid()) != nullptr);
    CHECK(w.hss.ledger(w.ue.identity()).empty());
}

TEST_CASE("UE rejects bad or stale responses") {
    World w;
    expect_code(Errc::NoWarrant, [&] { w.ue.begin_fast(w.rng); });

    auto req = w.ue.begin_initial(w.rng);
    auto core = w.hss.handle_initial(req, 1, Timestamp{0}, w.rng);
    auto relayed = relay_key_chain(core, w.mme, w.enb, w.henb, 1);

    SUBCASE("tampered C_2") {
        auto bad = relayed.to_ue;
        bad.c2.tag[3] ^= 0x80;
        expect_code(Errc::AuthFailure, [&] { w.ue.complete_initial(bad, 1, {}); });
        CHECK_FALSE(w.ue.warrant());
        CHECK(w.ue.has_pending_initial());
    }
    SUBCASE("answer to another session") {
        w.ue.begin_initial(w.rng);  // a new d replaces the pending one
        expect_code(Errc::ReplayDetected, [&] { w.ue.complete_initial(relayed.to_ue, 1, {}); });
        CHECK_FALSE(w.ue.warrant());
    }
    SUBCASE("warrant already expired on arrival") {
        const Timestamp late{w.params.warrant_lifetime_ms};
        expect_code(Errc::StaleWarrant, [&] { w.ue.complete_initial(relayed.to_ue, 1, late); });
        CHECK_FALSE(w.ue.warrant());
    }
    SUBCASE("no request outstanding") {
        w.ue.complete_initial(relayed.to_ue, 1, {});
        expect_code(Errc::ReplayDetected, [&] { w.ue.complete_initial(relayed.to_ue, 1, {}); });
    }
}

TEST_CASE("HeNB checks the list, then expiry") {
    World w;
    w.initial(Timestamp{1000});  // expiry lands after the first slot ends
    const auto expiry = w.ue.warrant()->expiry;

    SUBCASE("expired beyond the skew allowance") {
        auto req = w.ue.begin_fast(w.rng);
        expect_code(Errc::ExpiredWarrant, [&] { w.henb.handle_fast(req, Timestamp{expiry.ms + w.params.theta_ms}, w.rng); });
        // inside the allowance still works
        CHECK_NOTHROW(w.henb.handle_fast(req, Timestamp{expiry.ms + w.params.theta_ms - 1}, w.rng));
    }
    SUBCASE("revoked and expired reports revocation") {
        auto updates = w.hss.revoke_user(w.ue.identity(), Timestamp{2000});
        REQUIRE_FALSE(updates.empty());
        for (const auto& u : updates) {
            if (u.region == 1) w.henb.install_rlist(u.push);
        }
        auto req = w.ue.begin_fast(w.rng);
        expect_code(Errc::RevokedUE, [&] { w.henb.handle_fast(req, Timestamp{3000}, w.rng); });
        expect_code(Errc::RevokedUE, [&] { w.henb.handle_fast(req, Timestamp{expiry.ms + 60'000}, w.rng); });
    }
    SUBCASE("index out of range") {
        auto req = w.ue.begin_fast(w.rng);
        req.index = 9;
        expect_code(Errc::MalformedRequest, [&] { w.henb.handle_fast(req, {}, w.rng); });
    }
}

TEST_CASE("mutual authentication failures") {
    World w;
    w.initial(Timestamp{0});
    const auto warrant_before = *w.ue.warrant();
    auto req = w.ue.begin_fast(w.rng);
    auto ch = w.henb.handle_fast(req, Timestamp{1}, w.rng);

    SUBCASE("forged delta") {
        auto bad = ch.challenge;
        bad.delta.bytes()[0] ^= 1;
        expect_code(Errc::ServerAuthFailure, [&] { w.ue.handle_challenge(bad); });
        CHECK(w.ue.warrant()->lambda == warrant_before.lambda);
        CHECK_FALSE(w.ue.fast_session_key());
        CHECK(w.ue.has_pending_fast());
    }
    SUBCASE("tampered rotation ciphertext") {
        auto bad = ch.challenge;
        bad.c.body.back() ^= 4;
        expect_code(Errc::AuthFailure, [&] { w.ue.handle_challenge(bad); });
        CHECK(w.ue.warrant()->lambda == warrant_before.lambda);
    }
    SUBCASE("wrong r_h") {
        auto bad = ch.challenge;
        bad.r_h.bytes()[15] ^= 1;
        expect_code(Errc::ServerAuthFailure, [&] { w.ue.handle_challenge(bad); });
    }
    SUBCASE("forged delta'") {
        auto conf = w.ue.handle_challenge(ch.challenge);
        conf.delta_prime.bytes()[7] ^= 2;
        expect_code(Errc::ClientAuthFailure, [&] { w.henb.confirm(ch.session, conf, 99); });
        CHECK_FALSE(w.henb.key(99));
    }
    SUBCASE("challenge without a request") {
        w.ue.handle_challenge(ch.challenge);
        expect_code(Errc::ReplayDetected, [&] { w.ue.handle_challenge(ch.challenge); });
    }
}

TEST_CASE("list pushes must carry a valid MAC") {
    World w;
    const auto before = w.henb.installed_list();
    AccValue acc = accumulate(AccValue::empty(w.params.acc), from_hex("01"));
    RListPush forged{acc, list_mac(w.rng.block<SecretKey128>(), acc)};
    expect_code(Errc::RejectList, [&] { w.henb.install_rlist(forged); });
    CHECK(w.henb.installed_list() == before);
    CHECK(w.henb.install_count() == 0);
    RListPush good{acc, list_mac(w.region.group_key, acc)};
    w.henb.install_rlist(good);
    CHECK(w.henb.installed_list() == acc);
}

TEST_CASE("a HeNB of another region cannot serve the warrant") {
    World w;
    w.initial(Timestamp{0});
    const auto& other = w.hss.provision_region(2, 8, w.rng);
    Henb foreign(other, w.params);
    auto req = w.ue.begin_fast(w.rng);
    auto ch = foreign.handle_fast(req, Timestamp{1}, w.rng);
    expect_code(Errc::ServerAuthFailure, [&] { w.ue.handle_challenge(ch.challenge); });
}
