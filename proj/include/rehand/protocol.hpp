/**
 * @file protocol.hpp
 * @brief Entity state machines for registration, initial handover, the
 *        region-based fast handover and active revocation.
 *
 * Key custody follows one row per entity: the HSS/AuC keeps CK, the MME
 * K_M = F(CK), the eNB K_eN = F(K_M), the HeNB K_He = F(K_eN). Every handler
 * either completes and mutates its entity, or throws rehand::Error and leaves
 * the entity untouched.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "rehand/accumulator.hpp"
#include "rehand/bytes.hpp"
#include "rehand/crypto.hpp"
#include "rehand/messages.hpp"
#include "rehand/random.hpp"
#include "rehand/revocation.hpp"

namespace rehand {

using SessionId = std::uint64_t;

struct ProtocolParams {
    std::uint64_t warrant_lifetime_ms = 600'000;  // T_exp, defaults to T_RL
    std::uint64_t theta_ms = 5'000;               // clock-skew allowance past T_ex
    std::uint64_t slot_ms = 600'000;              // T_RL
    AccParams acc{};
};

/// What registration hands to the SIM: ID_i, rID_i, pID_i, K_i.
struct UeCredentials {
    UeIdentity id;
    AnonId rid;
    PseudonymId pid;
    SecretKey128 k;
};

/// Region credential: TID = (lambda, I), D_ij and T_ex.
struct Warrant {
    AnonId lambda;
    std::uint16_t index = 0;
    SecretKey128 region_secret;
    Timestamp expiry;
    RegionId region = 0;
};

struct KeyChain {
    SecretKey128 ck;
    SecretKey128 k_mme;
    SecretKey128 k_enb;
    SecretKey128 k_henb;

    static KeyChain from_ck(const SecretKey128& ck);
};

/// CK = H(d, pID*)
SecretKey128 derive_ck(const Nonce128& d, const PseudonymId& next_pid);

/// D_ij = H(GK_j, rID, T_ex), the same argument order at HSS and HeNB.
SecretKey128 derive_region_secret(const SecretKey128& group_key, const AnonId& rid, Timestamp expiry);

/// K_He' = H(D_ij, r_u, r_h)
SecretKey128 derive_fast_key(const SecretKey128& region_secret, const Nonce128& r_u, const Nonce128& r_h);
/// delta = H(D_ij, r_u, r_h, K_He')
Digest128 derive_delta(const SecretKey128& region_secret, const Nonce128& r_u, const Nonce128& r_h, const SecretKey128& key);
/// delta' = H(K_He', r_h)
Digest128 derive_delta_prime(const SecretKey128& key, const Nonce128& r_h);

/// GK_j and the k blind factors shared by the eNB and every HeNB of region j.
struct RegionProvision {
    RegionId id = 0;
    SecretKey128 group_key;
    std::vector<BlindFactor> blind_factors;  // bR^1..bR^k

    std::uint16_t k() const noexcept { return static_cast<std::uint16_t>(blind_factors.size()); }
    /// 1-based; throws Error(MalformedRequest) outside [1, k].
    const BlindFactor& blind(std::uint16_t index) const;
};

/// The (r_u, r_h, T_ex, lambda) a party observed in one fast handover.
struct FastTranscript {
    Nonce128 r_u;
    Nonce128 r_h;
    Timestamp expiry;
    AnonId lambda;

    friend bool operator==(const FastTranscript&, const FastTranscript&) = default;
};

class Ue {
public:
    explicit Ue(UeCredentials creds) : creds_(creds) {}

    /// Step 1 of the initial handover: fresh d, C_1 = E_{K_i}(pID, d).
    InitialRequest begin_initial(RandomSource& rng);

    /// Step 5: opens C_2, checks the echoed d and T_ex, rotates pID and
    /// installs the warrant and key chain.
    /// Errors: AuthFailure, DecodeFailure, ReplayDetected, StaleWarrant.
    void complete_initial(const InitialResponseHenb& msg, RegionId region, Timestamp now);

    /// Emits (lambda, I, r_u, T_ex) even past expiry; the HeNB decides.
    /// Errors: NoWarrant.
    FastRequest begin_fast(RandomSource& rng);

    /// Verifies delta, rotates TID from C and answers with delta'.
    /// Errors: ReplayDetected (no request outstanding), ServerAuthFailure,
    /// AuthFailure, DecodeFailure.
    FastConfirm handle_challenge(const FastChallenge& msg);

    const UeIdentity& identity() const noexcept { return creds_.id; }
    const PseudonymId& pid() const noexcept { return creds_.pid; }
    const SecretKey128& long_term_key() const noexcept { return creds_.k; }
    const std::optional<Warrant>& warrant() const noexcept { return warrant_; }
    const std::optional<KeyChain>& keychain() const noexcept { return keychain_; }
    const std::optional<SecretKey128>& fast_session_key() const noexcept { return fast_key_; }
    const std::optional<FastTranscript>& last_fast_transcript() const noexcept { return last_transcript_; }
    bool has_pending_initial() const noexcept { return pending_d_.has_value(); }
    bool has_pending_fast() const noexcept { return pending_ru_.has_value(); }
    void abandon_pending() noexcept {
        pending_d_.reset();
        pending_ru_.reset();
    }

private:
    UeCredentials creds_;
    std::optional<Nonce128> pending_d_;
    std::optional<Nonce128> pending_ru_;
    std::optional<Warrant> warrant_;
    std::optional<KeyChain> keychain_;
    std::optional<SecretKey128> fast_key_;
    std::optional<FastTranscript> last_transcript_;
};

/// One issued warrant as the HSS/AuC remembers it.
struct WarrantRecord {
    RegionId region = 0;
    SecretKey128 region_secret;
    Timestamp issued;
    Timestamp expiry;
    PseudonymId pid;   // pID* delivered with this warrant
    SecretKey128 ck;   // retained for the warrant's lifetime
    bool revoked = false;
};

struct UserRecord {
    UeIdentity id;
    AnonId rid;
    SecretKey128 k;
};

class Hss {
public:
    Hss(const ProtocolParams& params, RandomSource& rng);

    /// Issues GK_j and k blind factors (pairwise distinct) and opens an empty
    /// list for the region. Throws Error(ParamError) for k == 0 or a duplicate id.
    const RegionProvision& provision_region(RegionId id, std::uint16_t k, RandomSource& rng);

    /// Errors: AlreadyRegistered.
    UeCredentials register_ue(const UeIdentity& id, RandomSource& rng);

    /// Step 3 of the initial handover. Rotates rID/pID, issues the warrant,
    /// derives CK and K_M. Errors: UnknownUser, AuthFailure, DecodeFailure,
    /// IntegrityFailure, ParamError (unknown region).
    InitialResponseCore handle_initial(const InitialRequest& msg, RegionId region, Timestamp now, RandomSource& rng);

    /// Active revocation: absorbs every unexpired, not yet revoked warrant of
    /// the user that passes should_accumulate, and deregisters the user.
    /// Returns the list pushes to send (including slot openings the call
    /// had to perform first). Revoking an already revoked user returns no
    /// updates. Errors: UnknownUser.
    std::vector<ListUpdate> revoke_user(const UeIdentity& id, Timestamp now);

    /// Opens `slot` for every region and prunes expired ledger entries.
    std::vector<ListUpdate> issue_slot_lists(const TimeSlot& slot);

    const ProtocolParams& params() const noexcept { return params_; }
    const SecretKey128& pseudonym_key() const noexcept { return k_h_; }
    const RegionProvision& region(RegionId id) const;
    const UserRecord* find_user(const PseudonymId& pid) const;
    bool is_registered(const UeIdentity& id) const { return current_pid_.count(id) != 0; }
    bool is_revoked(const UeIdentity& id) const { return revoked_.count(id) != 0; }
    std::span<const WarrantRecord> ledger(const UeIdentity& id) const;
    const RevocationRegistry& revocation() const noexcept { return registry_; }
    std::size_t user_count() const noexcept { return users_.size(); }

private:
    std::vector<ListUpdate> advance_to(Timestamp now);

    ProtocolParams params_;
    SecretKey128 k_h_;
    std::map<RegionId, RegionProvision> regions_;
    std::map<PseudonymId, UserRecord> users_;
    std::map<UeIdentity, PseudonymId> current_pid_;
    std::set<UeIdentity> known_;
    std::set<UeIdentity> revoked_;
    std::map<UeIdentity, std::vector<WarrantRecord>> ledger_;
    RevocationRegistry registry_;
};

class Mme {
public:
    /// Keeps K_M, forwards {C_2, K_eN = F(K_M)}.
    InitialResponseEnb relay(const InitialResponseCore& msg, SessionId session);
    std::optional<SecretKey128> key(SessionId session) const;

private:
    std::map<SessionId, SecretKey128> keys_;
};

class Enb {
public:
    explicit Enb(RegionId region) : region_(region) {}

    /// Keeps K_eN, hands {C_2, K_He = F(K_eN)} to the serving HeNB.
    HenbKeyDelivery relay(const InitialResponseEnb& msg, SessionId session);
    std::optional<SecretKey128> key(SessionId session) const;
    RegionId region() const noexcept { return region_; }

private:
    RegionId region_;
    std::map<SessionId, SecretKey128> keys_;
};

/// HeNB-side state of a fast handover between challenge and confirm.
struct PendingSession {
    SecretKey128 session_key;  // K_He'
    FastTranscript transcript;
    std::uint16_t index = 0;
    AnonId next_lambda;
    std::uint16_t next_index = 0;
};

struct ChallengeResult {
    FastChallenge challenge;
    PendingSession session;
};

class Henb {
public:
    /// Starts with the empty list the region is initialised with.
    Henb(RegionProvision provision, const ProtocolParams& params);

    /// Installs {R, sigma} iff sigma = H(GK_j, R); the previous list stays
    /// active otherwise. Errors: RejectList.
    void install_rlist(const RListPush& push);

    /// Step 2 of the fast handover. Errors: MalformedRequest, RevokedUE,
    /// ExpiredWarrant.
    ChallengeResult handle_fast(const FastRequest& msg, Timestamp now, RandomSource& rng);

    /// Step 4. Accept installs K_He' under `session`. Errors: ClientAuthFailure.
    SecretKey128 confirm(const PendingSession& pending, const FastConfirm& msg, SessionId session);

    /// Initial handover: keeps K_He and forwards C_2 to the UE.
    InitialResponseHenb deliver_keys(const HenbKeyDelivery& msg, SessionId session);

    std::optional<SecretKey128> key(SessionId session) const;
    const AccValue& installed_list() const noexcept { return list_; }
    std::uint64_t install_count() const noexcept { return installs_; }
    const RegionProvision& provision() const noexcept { return provision_; }

private:
    RegionProvision provision_;
    ProtocolParams params_;
    AccValue list_;
    std::uint64_t installs_ = 0;
    std::map<SessionId, SecretKey128> keys_;
};

/// Messages produced along HSS -> MME -> eNB -> HeNB -> UE for one response.
struct RelayedKeys {
    InitialResponseEnb to_enb;
    HenbKeyDelivery to_henb;
    InitialResponseHenb to_ue;
};

/// Runs one response down the relay path; each hop keeps its key
/// and forwards only the next one.
RelayedKeys relay_key_chain(const InitialResponseCore& core, Mme& mme, Enb& enb, Henb& henb, SessionId session);

}  // namespace rehand
