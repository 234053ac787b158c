#include "rehand/simnet.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "rehand/errors.hpp"
#include "rehand/protocol.hpp"

namespace rehand::sim {

std::string_view kind_name(HandoverKind k) {
    return k == HandoverKind::Initial ? "initial" : "fast";
}

std::string_view cause_name(Cause c) {
    switch (c) {
        case Cause::Crossing: return "crossing";
        case Cause::Expiry: return "expiry";
        case Cause::Move: return "move";
        case Cause::NoWarrant: return "no-warrant";
        case Cause::WarrantLapsed: return "warrant-lapsed";
        case Cause::OtherRegion: return "other-region";
    }
    return "?";
}

double crossing_rate(const MobilityProfile& m) {
    return m.speed_kmh / (m.region_diameter_km * 3600.0);
}

double expiry_rate(const MobilityProfile& m) {
    return 1.0 / m.warrant_lifetime_s;
}

double handover_rate(const MobilityProfile& m) {
    return std::max(1.0, crossing_rate(m) + expiry_rate(m));
}

NextHandover next_handover(const MobilityProfile& m, RandomSource& rng) {
    const double total = handover_rate(m);
    NextHandover out;
    out.delay_s = rng.exponential(total);
    const double u = rng.uniform01() * total;
    const double cross = crossing_rate(m);
    if (u < cross) {
        out.kind = HandoverKind::Initial;
        out.cause = Cause::Crossing;
    } else if (u < cross + expiry_rate(m)) {
        out.kind = HandoverKind::Initial;
        out.cause = Cause::Expiry;
    } else {
        out.kind = HandoverKind::Fast;
        out.cause = Cause::Move;
    }
    return out;
}

namespace {

enum class Node { Ue, Henb, Enb, Mme, Hss };

std::uint64_t to_us(double ms) {
    return static_cast<std::uint64_t>(std::llround(ms * 1000.0));
}

UeIdentity identity_for(std::uint32_t ue) {
    UeIdentity id;
    const auto b = be64(std::uint64_t{ue} + 1);
    std::copy(b.begin(), b.end(), id.bytes().begin() + 8);
    return id;
}

struct InFlight {
    std::optional<std::size_t> handover;
    RegionId region = 0;
    std::uint32_t henb = 0;
    Node dst = Node::Ue;
    Bytes wire;
};

enum class EvType { Mobility, Deliver, Slot, Revoke };

struct Event {
    std::uint64_t t;
    std::uint64_t seq;
    EvType type;
    std::uint64_t arg;
    NextHandover next{};

    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
};

struct UeState {
    explicit UeState(Ue u) : ue(std::move(u)) {}

    Ue ue;
    RegionId region = 0;
    std::uint32_t henb = 0;
    std::uint64_t epoch = 0;
    bool revoked = false;
    bool stopped = false;
    std::optional<std::size_t> window;
};

struct Active {
    HandoverRecord rec;
    SessionId sid = 0;
    std::optional<PendingSession> pending;
    std::set<MsgType> sent_types;
    bool done = false;
};

class Engine {
public:
    explicit Engine(const ScenarioConfig& cfg)
        : cfg_(cfg),
          root_(cfg.seed),
          proto_rng_(root_.split(1)),
          mob_rng_(root_.split(2)),
          params_(make_params(cfg)),
          hss_(params_, proto_rng_) {
        for (RegionId r = 1; r <= cfg.topology.regions; ++r) {
            const RegionProvision& prov = hss_.provision_region(r, cfg.topology.blind_factors, proto_rng_);
            enbs_.emplace_back(r);
            std::vector<Henb> row;
            for (std::uint32_t h = 0; h < cfg.topology.henbs_per_region; ++h) row.emplace_back(prov, params_);
            henbs_.push_back(std::move(row));
        }
        for (std::uint32_t u = 0; u < cfg.ues; ++u) ues_.emplace_back(Ue(hss_.register_ue(identity_for(u), proto_rng_)));
        for (const auto& f : cfg.faults) faults_.emplace(std::make_pair(f.flow, f.target), f);
    }

    EventLog run() {
        for (std::uint32_t u = 0; u < ues_.size(); ++u) schedule_mobility(u, 0);
        for (std::size_t i = 0; i < cfg_.revocations.size(); ++i) {
            push_event(to_us(cfg_.revocations[i].at_s * 1000.0), EvType::Revoke, i);
        }
        push_event(slot_us_, EvType::Slot, 1);

        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            switch (ev.type) {
                case EvType::Mobility: on_mobility(static_cast<std::uint32_t>(ev.arg), ev.next); break;
                case EvType::Deliver: on_deliver(ev.arg); break;
                case EvType::Slot: on_slot(ev.arg); break;
                case EvType::Revoke: on_revoke(ev.arg); break;
            }
        }
        log_.counters.in_flight_at_end = flights_.size();
        for (auto& a : active_) {
            if (!a.done) throw Error(Errc::IntegrityFailure, "handover left unfinished at end of run");
        }
        std::stable_sort(log_.records.begin(), log_.records.end(),
                         [](const HandoverRecord& a, const HandoverRecord& b) { return a.start_us < b.start_us; });
        return std::move(log_);
    }

private:
    static ProtocolParams make_params(const ScenarioConfig& cfg) {
        ProtocolParams p;
        p.warrant_lifetime_ms = static_cast<std::uint64_t>(std::llround(cfg.mobility.warrant_lifetime_s * 1000.0));
        p.theta_ms = cfg.theta_ms;
        p.slot_ms = static_cast<std::uint64_t>(std::llround(cfg.slot_length_s * 1000.0));
        p.acc = cfg.acc;
        return p;
    }

    Timestamp now_ms() const { return Timestamp{now_ / 1000}; }

    void push_event(std::uint64_t t, EvType type, std::uint64_t arg, NextHandover next = {}) {
        queue_.push(Event{t, seq_++, type, arg, next});
    }

    bool starting_allowed() const {
        if (cfg_.handovers != 0 && active_.size() >= cfg_.handovers) return false;
        if (cfg_.duration_s > 0 && static_cast<double>(now_) > cfg_.duration_s * 1e6) return false;
        return true;
    }

    void schedule_mobility(std::uint32_t ue, std::uint64_t from) {
        const NextHandover next = next_handover(cfg_.mobility, mob_rng_);
        push_event(from + to_us(next.delay_s * 1000.0), EvType::Mobility, ue, next);
    }

    // List pushes alone do not keep the run alive.
    bool anything_pending() const {
        for (const auto& [id, f] : flights_) {
            if (f.handover) return true;
        }
        return std::any_of(ues_.begin(), ues_.end(), [](const UeState& s) { return !s.stopped; });
    }

    // ------------------------------------------------------------ transport

    void send(std::optional<std::size_t> hid, const Message& msg, Node dst, HopClass hop, RegionId region,
              std::uint32_t henb) {
        Bytes wire = encode(msg);
        const MsgType type = type_of(msg);
        if (hid) {
            Active& a = active_[*hid];
            const std::size_t bits = payload_bits(msg);
            if (hop == HopClass::Alpha) a.rec.bits_alpha += bits;
            if (hop == HopClass::Beta) {
                a.rec.bits_beta += bits;
                ++a.rec.msgs_beta;
            }
            if (hop == HopClass::Core) ++a.rec.msgs_core;
            const bool first = a.sent_types.insert(type).second;
            if (first) {
                auto it = faults_.find({type, static_cast<std::uint64_t>(*hid)});
                if (it != faults_.end() && !apply_fault(it->second, wire, type)) {
                    ++log_.counters.sent;
                    ++log_.counters.dropped;
                    finish(*hid, std::string(kDropped));
                    return;
                }
                auto& slot = replay_store_[type];
                slot = encode(msg);
            }
        } else if (type == MsgType::RListPush && dst == Node::Henb) {
            if (hop == HopClass::Beta) log_.counters.push_bits_beta += payload_bits(msg);
            auto it = faults_.find({type, push_counter_++});
            if (it != faults_.end() && !apply_fault(it->second, wire, type)) {
                ++log_.counters.sent;
                ++log_.counters.dropped;
                return;
            }
        } else if (hop == HopClass::Beta) {
            log_.counters.push_bits_beta += payload_bits(msg);
        }
        ++log_.counters.sent;
        const std::uint64_t id = next_flight_++;
        flights_.emplace(id, InFlight{hid, region, henb, dst, std::move(wire)});
        push_event(now_ + to_us(cfg_.latency.of(hop)), EvType::Deliver, id);
    }

    // Returns false when the message is to be dropped.
    bool apply_fault(const FaultSpec& f, Bytes& wire, MsgType type) {
        switch (f.kind) {
            case FaultKind::Drop:
                ++log_.counters.faults_applied;
                return false;
            case FaultKind::Corrupt: {
                const std::size_t body_bits = 8 * (wire.size() - 1);
                const std::size_t bit = f.bit ? *f.bit % body_bits : mob_rng_.uniform_index(body_bits);
                wire[1 + bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
                ++log_.counters.faults_applied;
                return true;
            }
            case FaultKind::Replay: {
                auto it = replay_store_.find(type);
                if (it == replay_store_.end()) {
                    ++log_.counters.faults_unapplied;
                    return true;
                }
                wire = it->second;
                ++log_.counters.faults_applied;
                return true;
            }
        }
        return true;
    }

    void on_deliver(std::uint64_t id) {
        auto node = flights_.extract(id);
        const InFlight f = std::move(node.mapped());
        ++log_.counters.delivered;
        if (f.handover && active_[*f.handover].done) return;

        Message msg;
        try {
            msg = decode(f.wire);
        } catch (const Error& e) {
            if (f.handover) {
                finish(*f.handover, std::string(errc_name(e.code())));
            } else if (f.dst == Node::Henb) {
                ++log_.counters.pushes_delivered;
                ++log_.counters.pushes_rejected;
            }
            return;
        }
        if (!f.handover) {
            deliver_push(f, msg);
            return;
        }
        const std::size_t hid = *f.handover;
        try {
            if (active_[hid].rec.kind == HandoverKind::Initial) step_initial(hid, f.dst, msg);
            else step_fast(hid, f.dst, msg);
        } catch (const Error& e) {
            std::string outcome(errc_name(e.code()));
            if (e.code() == Errc::RevokedUE && !ues_[active_[hid].rec.ue].revoked) outcome = kFalsePositive;
            finish(hid, outcome);
        }
    }

    // ------------------------------------------------------------ handovers

    Henb& henb_of(const HandoverRecord& r) { return henbs_[r.region - 1][r.henb]; }

    [[noreturn]] static void unexpected(const Message& msg) {
        throw Error(Errc::MalformedRequest, "unexpected " + std::string(type_name(type_of(msg))));
    }

    void step_initial(std::size_t hid, Node at, const Message& msg) {
        Active& a = active_[hid];
        const RegionId region = a.rec.region;
        const std::uint32_t h = a.rec.henb;
        switch (at) {
            case Node::Henb:
                if (auto* m = std::get_if<InitialRequest>(&msg)) return send(hid, *m, Node::Enb, HopClass::X2, region, h);
                if (auto* m = std::get_if<HenbKeyDelivery>(&msg)) {
                    return send(hid, henb_of(a.rec).deliver_keys(*m, a.sid), Node::Ue, HopClass::Alpha, region, h);
                }
                break;
            case Node::Enb:
                if (auto* m = std::get_if<InitialRequest>(&msg)) return send(hid, *m, Node::Mme, HopClass::Beta, region, h);
                if (auto* m = std::get_if<InitialResponseEnb>(&msg)) {
                    return send(hid, enbs_[region - 1].relay(*m, a.sid), Node::Henb, HopClass::X2, region, h);
                }
                break;
            case Node::Mme:
                if (auto* m = std::get_if<InitialRequest>(&msg)) return send(hid, *m, Node::Hss, HopClass::Core, region, h);
                if (auto* m = std::get_if<InitialResponseCore>(&msg)) {
                    return send(hid, mme_.relay(*m, a.sid), Node::Enb, HopClass::Beta, region, h);
                }
                break;
            case Node::Hss:
                if (auto* m = std::get_if<InitialRequest>(&msg)) {
                    return send(hid, hss_.handle_initial(*m, region, now_ms(), proto_rng_), Node::Mme, HopClass::Core,
                                region, h);
                }
                break;
            case Node::Ue:
                if (auto* m = std::get_if<InitialResponseHenb>(&msg)) {
                    UeState& s = ues_[a.rec.ue];
                    s.ue.complete_initial(*m, region, now_ms());
                    ++s.epoch;
                    return finish(hid, std::string(kAccepted));
                }
                break;
        }
        unexpected(msg);
    }

    void step_fast(std::size_t hid, Node at, const Message& msg) {
        Active& a = active_[hid];
        const RegionId region = a.rec.region;
        const std::uint32_t h = a.rec.henb;
        if (at == Node::Henb) {
            if (auto* m = std::get_if<FastRequest>(&msg)) {
                auto res = henb_of(a.rec).handle_fast(*m, now_ms(), proto_rng_);
                a.pending = res.session;
                return send(hid, res.challenge, Node::Ue, HopClass::Alpha, region, h);
            }
            if (auto* m = std::get_if<FastConfirm>(&msg)) {
                if (!a.pending) throw Error(Errc::ReplayDetected, "confirm without a challenge");
                henb_of(a.rec).confirm(*a.pending, *m, a.sid);
                return finish(hid, std::string(kAccepted));
            }
        } else if (at == Node::Ue) {
            if (auto* m = std::get_if<FastChallenge>(&msg)) {
                return send(hid, ues_[a.rec.ue].ue.handle_challenge(*m), Node::Henb, HopClass::Alpha, region, h);
            }
        }
        unexpected(msg);
    }

    void finish(std::size_t hid, std::string outcome) {
        Active& a = active_[hid];
        if (a.done) return;
        a.done = true;
        a.rec.end_us = now_;
        a.rec.outcome = std::move(outcome);
        UeState& s = ues_[a.rec.ue];
        s.ue.abandon_pending();
        if (a.rec.accepted() && s.window) {
            log_.windows[*s.window].last_accept_ms = static_cast<double>(now_) / 1000.0;
        }
        log_.records.push_back(a.rec);
        schedule_mobility(a.rec.ue, now_);
    }

    void on_mobility(std::uint32_t u, const NextHandover& next) {
        UeState& s = ues_[u];
        if (!starting_allowed()) {
            s.stopped = true;
            return;
        }
        const std::uint32_t regions = cfg_.topology.regions;
        HandoverRecord rec;
        rec.start_us = now_;
        rec.ue = u;
        rec.kind = next.kind;
        rec.cause = next.cause;
        rec.warrant_epoch = s.epoch;
        rec.revoked = s.revoked;

        if (s.region == 0) s.region = 1 + static_cast<RegionId>(mob_rng_.uniform_index(regions));
        if (next.cause == Cause::Crossing && regions > 1) {
            RegionId r = 1 + static_cast<RegionId>(mob_rng_.uniform_index(regions - 1));
            if (r >= s.region) ++r;
            s.region = r;
        }
        const auto& w = s.ue.warrant();
        if (rec.kind == HandoverKind::Fast) {
            if (!w) {
                rec.kind = HandoverKind::Initial;
                rec.cause = Cause::NoWarrant;
            } else if (w->region != s.region) {
                rec.kind = HandoverKind::Initial;
                rec.cause = Cause::OtherRegion;
            } else if (now_ms() >= w->expiry) {
                rec.kind = HandoverKind::Initial;
                rec.cause = Cause::WarrantLapsed;
            }
        }
        s.henb = static_cast<std::uint32_t>(mob_rng_.uniform_index(cfg_.topology.henbs_per_region));
        rec.region = s.region;
        rec.henb = s.henb;

        const std::size_t hid = active_.size();
        active_.push_back(Active{rec, next_sid_++, std::nullopt, {}, false});
        if (rec.kind == HandoverKind::Initial) {
            send(hid, s.ue.begin_initial(proto_rng_), Node::Henb, HopClass::Alpha, s.region, s.henb);
        } else {
            FastRequest req = s.ue.begin_fast(proto_rng_);
            active_[hid].rec.lambda = req.lambda;
            active_[hid].rec.blind_index = req.index;
            send(hid, req, Node::Henb, HopClass::Alpha, s.region, s.henb);
        }
    }

    // ------------------------------------------------------------ revocation

    void send_updates(const std::vector<ListUpdate>& updates) {
        for (const auto& u : updates) send(std::nullopt, u.push, Node::Mme, HopClass::Core, u.region, 0);
    }

    void deliver_push(const InFlight& f, const Message& msg) {
        const auto* push = std::get_if<RListPush>(&msg);
        if (!push) {
            if (f.dst == Node::Henb) {
                ++log_.counters.pushes_delivered;
                ++log_.counters.pushes_rejected;
            }
            return;
        }
        switch (f.dst) {
            case Node::Mme: return send(std::nullopt, *push, Node::Enb, HopClass::Beta, f.region, 0);
            case Node::Enb:
                for (std::uint32_t h = 0; h < cfg_.topology.henbs_per_region; ++h) {
                    send(std::nullopt, *push, Node::Henb, HopClass::X2, f.region, h);
                }
                return;
            case Node::Henb:
                ++log_.counters.pushes_delivered;
                try {
                    henbs_[f.region - 1][f.henb].install_rlist(*push);
                    ++log_.counters.pushes_installed;
                } catch (const Error&) {
                    ++log_.counters.pushes_rejected;
                }
                return;
            default: return;
        }
    }

    void on_slot(std::uint64_t index) {
        const TimeSlot slot = hss_.revocation().schedule().slot(index);
        if (hss_.revocation().current_slot() < index) send_updates(hss_.issue_slot_lists(slot));
        if (anything_pending()) push_event(now_ + slot_us_, EvType::Slot, index + 1);
    }

    void on_revoke(std::size_t i) {
        const auto& ev = cfg_.revocations[i];
        UeState& s = ues_[ev.ue];
        RevocationWindow w;
        w.ue = ev.ue;
        w.revoked_at_ms = static_cast<double>(now_) / 1000.0;
        const auto before = hss_.revocation().decisions().size();
        try {
            send_updates(hss_.revoke_user(s.ue.identity(), now_ms()));
        } catch (const Error& e) {
            if (e.code() != Errc::UnknownUser) throw;
            return;
        }
        const auto& d = hss_.revocation().decisions();
        for (std::size_t j = before; j < d.size(); ++j) {
            if (!d[j].carried && d[j].accumulated) w.accumulated = true;
        }
        s.revoked = true;
        s.window = log_.windows.size();
        log_.windows.push_back(w);
    }

    const ScenarioConfig& cfg_;
    RandomSource root_;
    RandomSource proto_rng_;
    RandomSource mob_rng_;
    ProtocolParams params_;
    Hss hss_;
    Mme mme_;
    std::vector<Enb> enbs_;
    std::vector<std::vector<Henb>> henbs_;
    std::vector<UeState> ues_;
    std::vector<Active> active_;
    std::map<std::pair<MsgType, std::uint64_t>, FaultSpec> faults_;
    std::map<MsgType, Bytes> replay_store_;
    std::map<std::uint64_t, InFlight> flights_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t slot_us_ = static_cast<std::uint64_t>(std::llround(cfg_.slot_length_s * 1e6));
    std::uint64_t now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t next_flight_ = 0;
    std::uint64_t push_counter_ = 0;
    SessionId next_sid_ = 1;
    EventLog log_;
};

// ---------------------------------------------------------------- CSV

constexpr std::string_view kHeader =
    "time,ue,region,kind,outcome,latency_ms,bits_alpha,bits_beta,henb,cause,msgs_beta,msgs_core,lambda,blind_index,"
    "warrant_epoch,revoked";

std::string fixed3(std::uint64_t us) {
    std::ostringstream os;
    os << us / 1000 << '.' << std::setw(3) << std::setfill('0') << us % 1000;
    return os.str();
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// "123.456" milliseconds -> microseconds, exactly.
std::uint64_t parse_ms(const std::string& s) {
    const auto dot = s.find('.');
    const std::string whole = s.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : s.substr(dot + 1);
    if (whole.empty() || frac.size() > 3) throw std::invalid_argument("bad time");
    frac.resize(3, '0');
    for (char ch : whole + frac) {
        if (ch < '0' || ch > '9') throw std::invalid_argument("bad time");
    }
    return std::stoull(whole) * 1000 + std::stoull(frac);
}

std::uint64_t parse_u64(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument("bad integer");
    return std::stoull(s);
}

}  // namespace

EventLog run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Engine engine(cfg);
    return engine.run();
}

void write_csv(std::ostream& out, const EventLog& log) {
    out << kHeader << '\n';
    for (const auto& r : log.records) {
        out << fixed3(r.start_us) << ',' << r.ue << ',' << r.region << ',' << kind_name(r.kind) << ',' << r.outcome << ','
            << fixed3(r.end_us - r.start_us) << ',' << r.bits_alpha << ',' << r.bits_beta << ',' << r.henb << ','
            << cause_name(r.cause) << ',' << r.msgs_beta << ',' << r.msgs_core << ','
            << (r.lambda ? r.lambda->hex() : std::string()) << ',' << r.blind_index << ',' << r.warrant_epoch << ','
            << (r.revoked ? 1 : 0) << '\n';
    }
}

EventLog read_csv(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t lineno = 0;
    auto bad = [&](const std::string& why) {
        throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": " + why);
    };
    if (!std::getline(in, line)) {
        lineno = 1;
        bad("missing header");
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) bad("unexpected header");

    const std::map<std::string, Cause, std::less<>> causes = {
        {"crossing", Cause::Crossing},     {"expiry", Cause::Expiry},
        {"move", Cause::Move},             {"no-warrant", Cause::NoWarrant},
        {"warrant-lapsed", Cause::WarrantLapsed}, {"other-region", Cause::OtherRegion}};

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 16) bad("expected 16 columns, got " + std::to_string(f.size()));
        HandoverRecord r;
        try {
            r.start_us = parse_ms(f[0]);
            r.ue = static_cast<std::uint32_t>(parse_u64(f[1]));
            r.region = static_cast<RegionId>(parse_u64(f[2]));
            if (f[3] == "initial") r.kind = HandoverKind::Initial;
            else if (f[3] == "fast") r.kind = HandoverKind::Fast;
            else bad("kind must be initial or fast");
            if (f[4].empty()) bad("empty outcome");
            r.outcome = f[4];
            r.end_us = r.start_us + parse_ms(f[5]);
            r.bits_alpha = parse_u64(f[6]);
            r.bits_beta = parse_u64(f[7]);
            r.henb = static_cast<std::uint32_t>(parse_u64(f[8]));
            auto c = causes.find(f[9]);
            if (c == causes.end()) bad("unknown cause '" + f[9] + "'");
            r.cause = c->second;
            r.msgs_beta = static_cast<std::uint32_t>(parse_u64(f[10]));
            r.msgs_core = static_cast<std::uint32_t>(parse_u64(f[11]));
            if (!f[12].empty()) r.lambda = AnonId::from_view(from_hex(f[12]));
            const auto idx = parse_u64(f[13]);
            if (idx > 0xFFFF) bad("blind_index out of range");
            r.blind_index = static_cast<std::uint16_t>(idx);
            r.warrant_epoch = parse_u64(f[14]);
            if (f[15] != "0" && f[15] != "1") bad("revoked must be 0 or 1");
            r.revoked = f[15] == "1";
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            bad(std::string("malformed field: ") + e.what());
        }
        log.records.push_back(std::move(r));
    }
    return log;
}

std::map<HandoverKind, LatencyStats> measure_latency(const EventLog& log) {
    if (log.records.empty()) throw Error(Errc::EmptyLog, "no handovers in log");
    std::map<HandoverKind, std::vector<double>> by_kind;
    for (const auto& r : log.records) {
        if (r.accepted()) by_kind[r.kind].push_back(r.latency_ms());
    }
    std::map<HandoverKind, LatencyStats> out;
    for (auto& [kind, v] : by_kind) {
        std::sort(v.begin(), v.end());
        auto rank = [&](double q) {
            const auto n = static_cast<double>(v.size());
            const auto i = static_cast<std::size_t>(std::ceil(q * n));
            return v[std::min(v.size() - 1, i == 0 ? 0 : i - 1)];
        };
        LatencyStats s;
        s.count = v.size();
        double sum = 0;
        for (double x : v) sum += x;
        s.mean = sum / static_cast<double>(v.size());
        s.p50 = rank(0.5);
        s.p95 = rank(0.95);
        s.max = v.back();
        out[kind] = s;
    }
    return out;
}

bool core_isolated(const EventLog& log) {
    return std::all_of(log.records.begin(), log.records.end(), [](const HandoverRecord& r) {
        return r.kind != HandoverKind::Fast || (r.msgs_beta == 0 && r.msgs_core == 0 && r.bits_beta == 0);
    });
}

std::map<RegionId, anon::ObservationSet> observation_sets(const EventLog& log, std::optional<std::uint16_t> k) {
    std::map<RegionId, anon::ObservationSet> out;
    std::map<RegionId, std::map<std::pair<std::uint32_t, std::uint64_t>, std::uint32_t>> labels;
    for (const auto& r : log.records) {
        if (r.kind != HandoverKind::Fast || !r.lambda) continue;
        auto& set = out[r.region];
        auto& lab = labels[r.region];
        auto [it, fresh] = lab.emplace(std::make_pair(r.ue, r.warrant_epoch), static_cast<std::uint32_t>(lab.size()));
        set.observations.push_back(anon::Observation{*r.lambda, r.blind_index, it->second});
        set.b = static_cast<std::uint32_t>(lab.size());
        set.k = k ? *k : std::max(set.k, r.blind_index);
    }
    return out;
}

}  // namespace rehand::sim
