/**
 * @file revocation.hpp
 * @brief Time-slotted revocation lists, one Nyberg accumulator per region.
 *
 * A warrant revoked during slot S_t is absorbed into its region's list only
 * if it would still be live when the next list is issued (T_ex > S_t.end);
 * otherwise passive expiry handles it. Absorbed entries are pushed at once
 * and carried into the next slot's list for as long as they remain live.
 */
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rehand/accumulator.hpp"
#include "rehand/bytes.hpp"
#include "rehand/messages.hpp"

namespace rehand {

struct TimeSlot {
    std::uint64_t index = 0;
    Timestamp start;
    Timestamp end;  // exclusive; end = start + T_RL

    bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
};

class SlotSchedule {
public:
    /// Throws Error(ParamError) for a zero slot length.
    explicit SlotSchedule(std::uint64_t slot_ms, Timestamp origin = {});

    std::uint64_t slot_ms() const noexcept { return slot_ms_; }
    TimeSlot slot(std::uint64_t index) const;
    /// Throws Error(ParamError) for times before the origin.
    TimeSlot slot_at(Timestamp t) const;

private:
    std::uint64_t slot_ms_;
    Timestamp origin_;
};

/// sigma_j = H(GK_j, R)
Digest128 list_mac(const SecretKey128& group_key, const AccValue& list);

struct RevocationList {
    RegionId region = 0;
    std::uint64_t slot = 0;
    AccValue acc;
    Digest128 sigma;

    static RevocationList sign(RegionId region, std::uint64_t slot, AccValue acc, const SecretKey128& group_key);
    bool verify(const SecretKey128& group_key) const { return list_mac(group_key, acc) == sigma; }
    RListPush push() const { return RListPush{acc, sigma}; }
};

/// True iff the warrant outlives the slot in which it is revoked.
/// Throws Error(ParamError) if revoke_time lies outside the slot.
bool should_accumulate(Timestamp expiry, Timestamp revoke_time, const TimeSlot& slot);

struct ListUpdate {
    RegionId region = 0;
    std::uint64_t slot = 0;
    RListPush push;
};

class RevocationRegistry {
public:
    struct Decision {
        RegionId region;
        std::uint64_t slot;
        Timestamp expiry;
        Timestamp decided_at;
        bool accumulated;
        bool carried;  // carry-over evaluated at a slot boundary
    };

    /// grace_ms extends how long a carried entry is kept past its expiry,
    /// matching the clock-skew allowance the HeNBs grant.
    RevocationRegistry(SlotSchedule schedule, AccParams params, std::uint64_t grace_ms = 0);

    void add_region(RegionId region, const SecretKey128& group_key);

    const SlotSchedule& schedule() const noexcept { return schedule_; }
    std::uint64_t current_slot() const noexcept { return current_slot_; }

    /// Moves every region to `slot`, carrying live entries forward. Returns
    /// one push per region. Throws Error(ParamError) when moving backwards.
    std::vector<ListUpdate> open_slot(const TimeSlot& slot);

    /// Applies should_accumulate for the current slot and absorbs the region
    /// secret when it holds. Returns whether it was absorbed.
    bool revoke(RegionId region, const SecretKey128& region_secret, Timestamp expiry, Timestamp now);

    const RevocationList& list(RegionId region) const;
    ListUpdate update(RegionId region) const;
    std::size_t member_count(RegionId region) const;
    const std::vector<Decision>& decisions() const noexcept { return decisions_; }
    std::vector<RegionId> regions() const;

private:
    struct Entry {
        SecretKey128 secret;
        Timestamp expiry;
    };
    struct RegionLists {
        SecretKey128 group_key;
        RevocationList current;
        std::vector<Entry> members;
    };

    RegionLists& region_state(RegionId region);

    SlotSchedule schedule_;
    AccParams params_;
    std::uint64_t grace_ms_;
    std::uint64_t current_slot_ = 0;
    std::map<RegionId, RegionLists> regions_;
    std::vector<Decision> decisions_;
};

}  // namespace rehand
