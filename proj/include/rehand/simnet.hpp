/**
 * @file simnet.hpp
 * @brief Discrete-event simulation of regions, UEs and the core.
 *
 * The event clock counts integer microseconds (C_alpha = 4.36 ms is not a
 * whole millisecond); protocol timestamps are the clock divided by 1000.
 * Events at equal times run in scheduling order.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rehand/anonymity.hpp"
#include "rehand/config.hpp"
#include "rehand/random.hpp"

namespace rehand::sim {

enum class HandoverKind { Initial, Fast };
std::string_view kind_name(HandoverKind k);

/// Why a handover took its kind.
enum class Cause { Crossing, Expiry, Move, NoWarrant, WarrantLapsed, OtherRegion };
std::string_view cause_name(Cause c);

inline constexpr std::string_view kAccepted = "Accepted";
inline constexpr std::string_view kDropped = "Dropped";
inline constexpr std::string_view kFalsePositive = "FalsePositiveRevocation";

struct HandoverRecord {
    std::uint64_t start_us = 0;
    std::uint64_t end_us = 0;
    std::uint32_t ue = 0;
    RegionId region = 0;
    std::uint32_t henb = 0;
    HandoverKind kind = HandoverKind::Initial;
    Cause cause = Cause::NoWarrant;
    std::string outcome;
    std::uint64_t bits_alpha = 0;
    std::uint64_t bits_beta = 0;
    std::uint32_t msgs_beta = 0;
    std::uint32_t msgs_core = 0;
    std::optional<AnonId> lambda;  // fast handovers: the TID the UE put on air
    std::uint16_t blind_index = 0;
    std::uint64_t warrant_epoch = 0;  // successful initial handovers before this one
    bool revoked = false;             // ground truth at start

    double latency_ms() const { return static_cast<double>(end_us - start_us) / 1000.0; }
    bool accepted() const { return outcome == kAccepted; }
};

struct Counters {
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_flight_at_end = 0;
    std::uint64_t faults_applied = 0;
    std::uint64_t faults_unapplied = 0;
    std::uint64_t pushes_delivered = 0;  // RListPush arrivals at HeNBs
    std::uint64_t pushes_installed = 0;
    std::uint64_t pushes_rejected = 0;
    std::uint64_t push_bits_beta = 0;
};

/// Time between a revocation and the last accepted handover of that UE.
struct RevocationWindow {
    std::uint32_t ue = 0;
    double revoked_at_ms = 0;
    std::optional<double> last_accept_ms;
    bool accumulated = false;
};

struct EventLog {
    std::vector<HandoverRecord> records;
    Counters counters;
    std::vector<RevocationWindow> windows;
};

/// time,ue,region,kind,outcome,latency_ms,bits_alpha,bits_beta followed by
/// henb,cause,msgs_beta,msgs_core,lambda,blind_index,warrant_epoch,revoked.
void write_csv(std::ostream& out, const EventLog& log);
/// Reads what write_csv wrote (counters are not part of the CSV).
/// Throws Error(ConfigError) with a line number on malformed input.
EventLog read_csv(std::istream& in);

double crossing_rate(const MobilityProfile& m);  // v / (r * 3600) per second
double expiry_rate(const MobilityProfile& m);    // 1 / T_exp per second
/// Handover attempts per second: max(1, crossing + expiry).
double handover_rate(const MobilityProfile& m);

struct NextHandover {
    double delay_s = 0;
    HandoverKind kind = HandoverKind::Fast;
    Cause cause = Cause::Move;
};

/// Exponential wait at handover_rate; the kind is initial with probability
/// (crossing + expiry) / rate, split between the two causes by their rates.
NextHandover next_handover(const MobilityProfile& m, RandomSource& rng);

/// Runs the scenario from cfg.seed. Throws Error(ConfigError) for an invalid config.
EventLog run_scenario(const ScenarioConfig& cfg);

struct LatencyStats {
    std::size_t count = 0;
    double mean = 0, p50 = 0, p95 = 0, max = 0;
};

/// Accepted handovers only, per kind. Throws Error(EmptyLog) on an empty log.
std::map<HandoverKind, LatencyStats> measure_latency(const EventLog& log);

/// True iff no fast handover sent anything over a beta or core hop.
bool core_isolated(const EventLog& log);

/// Fast-handover TIDs grouped per region; each (ue, warrant_epoch) pair is
/// one anonymous identity. k defaults to the largest index seen.
std::map<RegionId, anon::ObservationSet> observation_sets(const EventLog& log, std::optional<std::uint16_t> k = {});

}  // namespace rehand::sim
