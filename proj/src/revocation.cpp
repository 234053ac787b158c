#include "rehand/revocation.hpp"

#include <algorithm>

#include "rehand/errors.hpp"
#include "rehand/protocol.hpp"

namespace rehand {

SlotSchedule::SlotSchedule(std::uint64_t slot_ms, Timestamp origin) : slot_ms_(slot_ms), origin_(origin) {
    if (slot_ms == 0) throw Error(Errc::ParamError, "slot length must be positive");
}

TimeSlot SlotSchedule::slot(std::uint64_t index) const {
    const std::uint64_t start = origin_.ms + index * slot_ms_;
    return TimeSlot{index, Timestamp{start}, Timestamp{start + slot_ms_}};
}

TimeSlot SlotSchedule::slot_at(Timestamp t) const {
    if (t < origin_) throw Error(Errc::ParamError, "time precedes the slot origin");
    return slot((t.ms - origin_.ms) / slot_ms_);
}

Digest128 list_mac(const SecretKey128& group_key, const AccValue& list) {
    return prf_hash({group_key.view(), ByteView(list.bits().bytes())});
}

RevocationList RevocationList::sign(RegionId region, std::uint64_t slot, AccValue acc, const SecretKey128& group_key) {
    Digest128 sigma = list_mac(group_key, acc);
    return RevocationList{region, slot, std::move(acc), sigma};
}

bool should_accumulate(Timestamp expiry, Timestamp revoke_time, const TimeSlot& slot) {
    if (!slot.contains(revoke_time)) {
        throw Error(Errc::ParamError, "revocation at t=" + std::to_string(revoke_time.ms) + " is outside slot [" +
                                          std::to_string(slot.start.ms) + ", " + std::to_string(slot.end.ms) + ")");
    }
    return expiry > slot.end;
}

// ---------------------------------------------------------------- registry

RevocationRegistry::RevocationRegistry(SlotSchedule schedule, AccParams params, std::uint64_t grace_ms)
    : schedule_(schedule), params_(params), grace_ms_(grace_ms) {
    params_.validate();
}

void RevocationRegistry::add_region(RegionId region, const SecretKey128& group_key) {
    if (regions_.count(region) != 0) throw Error(Errc::ParamError, "region " + std::to_string(region) + " already present");
    RegionLists rl{group_key, RevocationList::sign(region, current_slot_, AccValue::empty(params_), group_key), {}};
    regions_.emplace(region, std::move(rl));
}

RevocationRegistry::RegionLists& RevocationRegistry::region_state(RegionId region) {
    auto it = regions_.find(region);
    if (it == regions_.end()) throw Error(Errc::ParamError, "unknown region " + std::to_string(region));
    return it->second;
}

std::vector<ListUpdate> RevocationRegistry::open_slot(const TimeSlot& slot) {
    if (slot.index < current_slot_) {
        throw Error(Errc::ParamError, "cannot reopen slot " + std::to_string(slot.index) + " after slot " +
                                          std::to_string(current_slot_));
    }
    std::vector<ListUpdate> out;
    for (auto& [id, rl] : regions_) {
        std::vector<Entry> kept;
        AccValue acc = AccValue::empty(params_);
        for (const auto& e : rl.members) {
            const bool live = e.expiry.ms + grace_ms_ > slot.start.ms;
            decisions_.push_back(Decision{id, slot.index, e.expiry, slot.start, live, true});
            if (!live) continue;
            acc = accumulate(acc, e.secret.view());
            kept.push_back(e);
        }
        rl.members = std::move(kept);
        rl.current = RevocationList::sign(id, slot.index, std::move(acc), rl.group_key);
        out.push_back(ListUpdate{id, slot.index, rl.current.push()});
    }
    current_slot_ = slot.index;
    return out;
}

bool RevocationRegistry::revoke(RegionId region, const SecretKey128& region_secret, Timestamp expiry, Timestamp now) {
    RegionLists& rl = region_state(region);
    const bool absorb = should_accumulate(expiry, now, schedule_.slot(current_slot_));
    decisions_.push_back(Decision{region, current_slot_, expiry, now, absorb, false});
    if (!absorb) return false;
    rl.members.push_back(Entry{region_secret, expiry});
    rl.current = RevocationList::sign(region, current_slot_, accumulate(rl.current.acc, region_secret.view()), rl.group_key);
    return true;
}

const RevocationList& RevocationRegistry::list(RegionId region) const {
    auto it = regions_.find(region);
    if (it == regions_.end()) throw Error(Errc::ParamError, "unknown region " + std::to_string(region));
    return it->second.current;
}

ListUpdate RevocationRegistry::update(RegionId region) const {
    const RevocationList& l = list(region);
    return ListUpdate{region, l.slot, l.push()};
}

std::size_t RevocationRegistry::member_count(RegionId region) const {
    auto it = regions_.find(region);
    if (it == regions_.end()) throw Error(Errc::ParamError, "unknown region " + std::to_string(region));
    return it->second.members.size();
}

std::vector<RegionId> RevocationRegistry::regions() const {
    std::vector<RegionId> out;
    for (const auto& [id, rl] : regions_) out.push_back(id);
    return out;
}

// ---------------------------------------------------------------- HSS side

std::vector<ListUpdate> Hss::advance_to(Timestamp now) {
    const TimeSlot target = registry_.schedule().slot_at(now);
    if (target.index <= registry_.current_slot()) return {};
    return issue_slot_lists(target);
}

std::vector<ListUpdate> Hss::issue_slot_lists(const TimeSlot& slot) {
    auto out = registry_.open_slot(slot);
    for (auto& [id, records] : ledger_) {
        std::erase_if(records, [&](const WarrantRecord& w) { return w.expiry.ms + params_.theta_ms <= slot.start.ms; });
    }
    return out;
}

std::vector<ListUpdate> Hss::revoke_user(const UeIdentity& id, Timestamp now) {
    if (revoked_.count(id) != 0) return {};  // already absorbed; lists unchanged
    auto pid_it = current_pid_.find(id);
    if (pid_it == current_pid_.end()) throw Error(Errc::UnknownUser, "identity " + id.hex() + " is not registered");

    std::vector<ListUpdate> out = advance_to(now);
    std::set<RegionId> touched;
    for (auto& w : ledger_[id]) {
        if (w.revoked || w.expiry.ms + params_.theta_ms <= now.ms) continue;
        if (registry_.revoke(w.region, w.region_secret, w.expiry, now)) touched.insert(w.region);
        w.revoked = true;
    }
    for (RegionId r : touched) out.push_back(registry_.update(r));

    users_.erase(pid_it->second);
    current_pid_.erase(pid_it);
    revoked_.insert(id);
    return out;
}

}  // namespace rehand
