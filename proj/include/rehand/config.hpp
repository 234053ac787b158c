/**
 * @file config.hpp
 * @brief Scenario configuration (YAML) for the simulator and cost sweep.
 *
 * Unknown keys are rejected. Errors carry Errc::ConfigError with the line
 * number and dotted field path.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rehand/accumulator.hpp"
#include "rehand/costmodel.hpp"
#include "rehand/messages.hpp"

namespace rehand::sim {

enum class HopClass { Alpha, X2, Beta, Core };
std::string_view hop_class_name(HopClass h);

struct LatencyMap {
    double c_alpha_ms = 4.36;   // UE <-> HeNB
    double c_beta_ms = 261.76;  // eNB <-> MME
    double x2_ms = 0.0;         // HeNB <-> eNB
    double core_ms = 0.0;       // MME <-> HSS/AuC

    double of(HopClass h) const;
};

struct Topology {
    std::uint32_t regions = 1;
    std::uint32_t henbs_per_region = 4;
    std::uint16_t blind_factors = 8;  // k per region
};

struct MobilityProfile {
    double speed_kmh = 120;
    double region_diameter_km = 2;
    double warrant_lifetime_s = 600;
};

struct RevocationEvent {
    std::uint32_t ue = 0;
    double at_s = 0;
};

enum class FaultKind { Drop, Corrupt, Replay };
std::string_view fault_kind_name(FaultKind k);

/// Applied to one message: flow `flow` of handover number `handover`
/// (0-based, in start order), or the `push`-th revocation-list delivery to a
/// HeNB when flow is RListPush.
struct FaultSpec {
    FaultKind kind = FaultKind::Drop;
    MsgType flow = MsgType::FastRequest;
    std::uint64_t target = 0;
    std::optional<std::size_t> bit;  // Corrupt: bit offset into the wire bytes after the type byte
};

struct CostSettings {
    cost::Grid grid = cost::Grid::defaults();
    cost::CostConstants constants{};
    cost::CostAssumptions assumptions{};
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    Topology topology{};
    LatencyMap latency{};
    MobilityProfile mobility{};
    std::uint32_t ues = 1;
    std::uint64_t handovers = 100;  // stop after this many have started (0: no cap)
    double duration_s = 0;          // stop starting new ones after this (0: no limit)
    double slot_length_s = 600;     // T_RL
    std::uint64_t theta_ms = 5000;
    AccParams acc{};
    std::vector<RevocationEvent> revocations;
    std::vector<FaultSpec> faults;
    CostSettings costs{};

    /// Throws Error(ConfigError) naming the offending field.
    void validate() const;
};

/// Throws Error(ConfigError) with "path:line: field: reason" diagnostics.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");

}  // namespace rehand::sim
