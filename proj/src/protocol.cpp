#include "rehand/protocol.hpp"

#include <algorithm>

#include "rehand/errors.hpp"

namespace rehand {

namespace {

// C_2 carries (lambda, I, D_ij, T_ex, d, pID*).
constexpr std::size_t kC2Fields = 6;

template <class B>
B field_block(const Bytes& f) {
    if (f.size() != B::kSize) throw Error(Errc::DecodeFailure, "sealed field has the wrong width");
    return B::from_view(f);
}

std::uint16_t field_u16(const Bytes& f) {
    if (f.size() != 2) throw Error(Errc::DecodeFailure, "sealed index has the wrong width");
    return read_be16(f);
}

Timestamp field_ts(const Bytes& f) {
    if (f.size() != 8) throw Error(Errc::DecodeFailure, "sealed timestamp has the wrong width");
    return Timestamp{read_be64(f)};
}

}  // namespace

SecretKey128 derive_fast_key(const SecretKey128& region_secret, const Nonce128& r_u, const Nonce128& r_h) {
    return block_cast<SecretKey128>(prf_hash({region_secret.view(), r_u.view(), r_h.view()}));
}

Digest128 derive_delta(const SecretKey128& region_secret, const Nonce128& r_u, const Nonce128& r_h, const SecretKey128& key) {
    return prf_hash({region_secret.view(), r_u.view(), r_h.view(), key.view()});
}

Digest128 derive_delta_prime(const SecretKey128& key, const Nonce128& r_h) {
    return prf_hash({key.view(), r_h.view()});
}

KeyChain KeyChain::from_ck(const SecretKey128& ck) {
    KeyChain kc;
    kc.ck = ck;
    kc.k_mme = kdf_next(ck);
    kc.k_enb = kdf_next(kc.k_mme);
    kc.k_henb = kdf_next(kc.k_enb);
    return kc;
}

SecretKey128 derive_ck(const Nonce128& d, const PseudonymId& next_pid) {
    return block_cast<SecretKey128>(prf_hash({d.view(), next_pid.view()}));
}

SecretKey128 derive_region_secret(const SecretKey128& group_key, const AnonId& rid, Timestamp expiry) {
    auto t = expiry.encode();
    return block_cast<SecretKey128>(prf_hash({group_key.view(), rid.view(), ByteView(t)}));
}

const BlindFactor& RegionProvision::blind(std::uint16_t index) const {
    if (index < 1 || index > blind_factors.size()) {
        throw Error(Errc::MalformedRequest, "blind-factor index " + std::to_string(index) + " outside [1, " +
                                                std::to_string(blind_factors.size()) + "]");
    }
    return blind_factors[index - 1];
}

// ---------------------------------------------------------------- UE

InitialRequest Ue::begin_initial(RandomSource& rng) {
    auto d = rng.block<Nonce128>();
    InitialRequest req{creds_.pid, seal(creds_.k, {creds_.pid.view(), d.view()}, rng)};
    pending_d_ = d;
    return req;
}

void Ue::complete_initial(const InitialResponseHenb& msg, RegionId region, Timestamp now) {
    if (!pending_d_) throw Error(Errc::ReplayDetected, "no initial handover outstanding");
    FieldList f = open(creds_.k, msg.c2);
    if (f.size() != kC2Fields) throw Error(Errc::DecodeFailure, "C_2 must carry 6 fields");

    Warrant w;
    w.lambda = field_block<AnonId>(f[0]);
    w.index = field_u16(f[1]);
    w.region_secret = field_block<SecretKey128>(f[2]);
    w.expiry = field_ts(f[3]);
    w.region = region;
    auto d = field_block<Nonce128>(f[4]);
    auto next_pid = field_block<PseudonymId>(f[5]);

    if (!(d == *pending_d_)) throw Error(Errc::ReplayDetected, "C_2 answers a different session");
    if (w.expiry <= now) throw Error(Errc::StaleWarrant, "warrant already expired on arrival");

    creds_.pid = next_pid;
    warrant_ = w;
    keychain_ = KeyChain::from_ck(derive_ck(d, next_pid));
    pending_d_.reset();
}

FastRequest Ue::begin_fast(RandomSource& rng) {
    if (!warrant_) throw Error(Errc::NoWarrant, "fast handover needs a warrant");
    auto r_u = rng.block<Nonce128>();
    pending_ru_ = r_u;
    return FastRequest{warrant_->lambda, warrant_->index, r_u, warrant_->expiry};
}

FastConfirm Ue::handle_challenge(const FastChallenge& msg) {
    if (!pending_ru_ || !warrant_) throw Error(Errc::ReplayDetected, "no fast handover outstanding");
    const auto& dij = warrant_->region_secret;
    auto key = derive_fast_key(dij, *pending_ru_, msg.r_h);
    if (!(derive_delta(dij, *pending_ru_, msg.r_h, key) == msg.delta)) {
        throw Error(Errc::ServerAuthFailure, "delta does not verify");
    }
    FieldList f = open(dij, msg.c);
    if (f.size() != 2) throw Error(Errc::DecodeFailure, "C must carry 2 fields");
    auto next_lambda = field_block<AnonId>(f[0]);
    auto next_index = field_u16(f[1]);

    last_transcript_ = FastTranscript{*pending_ru_, msg.r_h, warrant_->expiry, warrant_->lambda};
    warrant_->lambda = next_lambda;
    warrant_->index = next_index;
    fast_key_ = key;
    pending_ru_.reset();
    return FastConfirm{derive_delta_prime(key, msg.r_h)};
}

// ---------------------------------------------------------------- HSS/AuC

Hss::Hss(const ProtocolParams& params, RandomSource& rng)
    : params_(params),
      k_h_(rng.block<SecretKey128>()),
      registry_(SlotSchedule(params.slot_ms), params.acc, params.theta_ms) {
    params_.acc.validate();
}

const RegionProvision& Hss::provision_region(RegionId id, std::uint16_t k, RandomSource& rng) {
    if (k == 0) throw Error(Errc::ParamError, "a region needs at least one blind factor");
    if (regions_.count(id) != 0) throw Error(Errc::ParamError, "region " + std::to_string(id) + " already provisioned");
    RegionProvision p;
    p.id = id;
    p.group_key = rng.block<SecretKey128>();
    std::set<BlindFactor> seen;
    while (p.blind_factors.size() < k) {
        auto b = rng.block<BlindFactor>();
        if (seen.insert(b).second) p.blind_factors.push_back(b);
    }
    registry_.add_region(id, p.group_key);
    return regions_.emplace(id, std::move(p)).first->second;
}

UeCredentials Hss::register_ue(const UeIdentity& id, RandomSource& rng) {
    if (known_.count(id) != 0) throw Error(Errc::AlreadyRegistered, "identity " + id.hex());
    UeCredentials c;
    c.id = id;
    c.k = rng.block<SecretKey128>();
    do {
        c.rid = rng.block<AnonId>();
        c.pid = pseudonym_encrypt(k_h_, c.rid);
    } while (users_.count(c.pid) != 0);
    users_.emplace(c.pid, UserRecord{id, c.rid, c.k});
    current_pid_.emplace(id, c.pid);
    known_.insert(id);
    return c;
}

InitialResponseCore Hss::handle_initial(const InitialRequest& msg, RegionId region, Timestamp now, RandomSource& rng) {
    auto user_it = users_.find(msg.pid);
    if (user_it == users_.end()) throw Error(Errc::UnknownUser, "pID not in database");
    auto region_it = regions_.find(region);
    if (region_it == regions_.end()) throw Error(Errc::ParamError, "unknown region " + std::to_string(region));
    const UserRecord& user = user_it->second;
    const RegionProvision& prov = region_it->second;

    if (!(pseudonym_decrypt(k_h_, msg.pid) == user.rid)) throw Error(Errc::IntegrityFailure, "pID does not map to the stored rID");
    FieldList f = open(user.k, msg.c1);
    if (f.size() != 2) throw Error(Errc::DecodeFailure, "C_1 must carry 2 fields");
    auto inner_pid = field_block<PseudonymId>(f[0]);
    auto d = field_block<Nonce128>(f[1]);
    if (!(inner_pid == msg.pid)) throw Error(Errc::IntegrityFailure, "decrypted pID differs from the clear pID");

    AnonId next_rid;
    PseudonymId next_pid;
    do {
        next_rid = rng.block<AnonId>();
        next_pid = pseudonym_encrypt(k_h_, next_rid);
    } while (users_.count(next_pid) != 0);

    const auto index = static_cast<std::uint16_t>(1 + rng.uniform_index(prov.k()));
    const AnonId lambda = next_rid ^ prov.blind(index);
    const Timestamp expiry{now.ms + params_.warrant_lifetime_ms};
    const SecretKey128 dij = derive_region_secret(prov.group_key, next_rid, expiry);
    const auto idx = be16(index);
    const auto t = expiry.encode();
    Ciphertext c2 = seal(user.k,
                         {lambda.view(), ByteView(idx), dij.view(), ByteView(t), d.view(), next_pid.view()}, rng);
    const KeyChain kc = KeyChain::from_ck(derive_ck(d, next_pid));

    UserRecord updated{user.id, next_rid, user.k};
    users_.erase(user_it);
    users_.emplace(next_pid, updated);
    current_pid_[updated.id] = next_pid;
    ledger_[updated.id].push_back(WarrantRecord{region, dij, now, expiry, next_pid, kc.ck, false});
    return InitialResponseCore{std::move(c2), kc.k_mme};
}

const RegionProvision& Hss::region(RegionId id) const {
    auto it = regions_.find(id);
    if (it == regions_.end()) throw Error(Errc::ParamError, "unknown region " + std::to_string(id));
    return it->second;
}

const UserRecord* Hss::find_user(const PseudonymId& pid) const {
    auto it = users_.find(pid);
    return it == users_.end() ? nullptr : &it->second;
}

std::span<const WarrantRecord> Hss::ledger(const UeIdentity& id) const {
    auto it = ledger_.find(id);
    if (it == ledger_.end()) return {};
    return it->second;
}

// ---------------------------------------------------------------- MME / eNB

InitialResponseEnb Mme::relay(const InitialResponseCore& msg, SessionId session) {
    keys_[session] = msg.k_mme;
    return InitialResponseEnb{msg.c2, kdf_next(msg.k_mme)};
}

std::optional<SecretKey128> Mme::key(SessionId session) const {
    auto it = keys_.find(session);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
}

HenbKeyDelivery Enb::relay(const InitialResponseEnb& msg, SessionId session) {
    keys_[session] = msg.k_enb;
    return HenbKeyDelivery{msg.c2, kdf_next(msg.k_enb)};
}

std::optional<SecretKey128> Enb::key(SessionId session) const {
    auto it = keys_.find(session);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------- HeNB

Henb::Henb(RegionProvision provision, const ProtocolParams& params)
    : provision_(std::move(provision)), params_(params), list_(AccValue::empty(params.acc)) {}

void Henb::install_rlist(const RListPush& push) {
    if (!(list_mac(provision_.group_key, push.list) == push.sigma)) {
        throw Error(Errc::RejectList, "sigma does not verify under the region group key");
    }
    list_ = push.list;
    ++installs_;
}

ChallengeResult Henb::handle_fast(const FastRequest& msg, Timestamp now, RandomSource& rng) {
    const BlindFactor& blind = provision_.blind(msg.index);
    const AnonId t_rid = msg.lambda ^ blind;
    const SecretKey128 dij = derive_region_secret(provision_.group_key, t_rid, msg.expiry);

    // Membership in R means revoked: refuse service on a hit, including a false positive.
    if (contains(list_, dij.view())) throw Error(Errc::RevokedUE, "region secret is in the revocation list");
    if (now.ms >= msg.expiry.ms + params_.theta_ms) throw Error(Errc::ExpiredWarrant, "warrant expired");

    auto r_h = rng.block<Nonce128>();
    auto key = derive_fast_key(dij, msg.r_u, r_h);
    auto delta = derive_delta(dij, msg.r_u, r_h, key);

    std::uint16_t next_index = msg.index;
    if (provision_.k() > 1) {
        next_index = static_cast<std::uint16_t>(1 + rng.uniform_index(provision_.k() - 1u));
        if (next_index >= msg.index) ++next_index;
    }
    const AnonId next_lambda = t_rid ^ provision_.blind(next_index);
    const auto idx = be16(next_index);
    Ciphertext c = seal(dij, {next_lambda.view(), ByteView(idx)}, rng);

    PendingSession pending{key, FastTranscript{msg.r_u, r_h, msg.expiry, msg.lambda}, msg.index, next_lambda, next_index};
    return ChallengeResult{FastChallenge{delta, r_h, std::move(c)}, pending};
}

SecretKey128 Henb::confirm(const PendingSession& pending, const FastConfirm& msg, SessionId session) {
    if (!(derive_delta_prime(pending.session_key, pending.transcript.r_h) == msg.delta_prime)) {
        throw Error(Errc::ClientAuthFailure, "delta' does not verify");
    }
    keys_[session] = pending.session_key;
    return pending.session_key;
}

InitialResponseHenb Henb::deliver_keys(const HenbKeyDelivery& msg, SessionId session) {
    keys_[session] = msg.k_henb;
    return InitialResponseHenb{msg.c2};
}

std::optional<SecretKey128> Henb::key(SessionId session) const {
    auto it = keys_.find(session);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
}

RelayedKeys relay_key_chain(const InitialResponseCore& core, Mme& mme, Enb& enb, Henb& henb, SessionId session) {
    RelayedKeys out;
    out.to_enb = mme.relay(core, session);
    out.to_henb = enb.relay(out.to_enb, session);
    out.to_ue = henb.deliver_keys(out.to_henb, session);
    return out;
}

}  // namespace rehand
