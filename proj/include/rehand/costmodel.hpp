/**
 * @file costmodel.hpp
 * @brief Analytic computation/communication costs for ReHand and the
 *        CPAL, Time-bound and HashHand baselines.
 *
 * All costs are milliseconds per authentication. Communication charges a
 * hop class latency C per 512-bit frame.
 */
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rehand::cost {

enum class Scheme { ReHand, HashHand, TimeBound, Cpal };

std::string_view scheme_name(Scheme s);
/// Accepts "ReHand", "HashHand", "TimeBound"/"Time-bound", "CPAL" (case-insensitive).
/// Throws Error(ParamError) otherwise.
Scheme scheme_from_name(std::string_view name);

inline constexpr Scheme kAllSchemes[] = {Scheme::ReHand, Scheme::HashHand, Scheme::TimeBound, Scheme::Cpal};
inline constexpr Scheme kBaselines[] = {Scheme::HashHand, Scheme::TimeBound, Scheme::Cpal};

/// linear: bits/frame * C.  ceil: ceil(bits/frame) * C for every C-weighted group.
enum class FrameMode { Linear, Ceil };

std::string_view frame_mode_name(FrameMode m);
FrameMode frame_mode_from_name(std::string_view name);

struct SideTimings {
    double t_se = 0, t_h = 0, t_e = 0, t_m = 0, t_p = 0, t_me = 0, t_ph = 0, t_inv = 0;
};

struct TimingConstants {
    SideTimings ue;
    SideTimings system;

    /// UE: T_SE=6.8e-3, T_H=6e-3, T_e=T_Inv=70.1, T_p=135.5, T_me=105.15, T_pH=10.2.
    /// System: T_e=T_Inv=9.505, T_m=9.556, T_p=5.065, T_me=14.257, T_pH=1.413;
    /// T_SE and T_H are not listed for the system and reuse the UE values.
    /// T_m is not listed for the UE and is set to the system value.
    static TimingConstants defaults();
    void validate() const;
};

struct LengthConstants {
    double l_id = 128, l_n = 128, l_h = 128, l_k = 128;
    double l_g = 170, l_p = 171, l_t = 64;
    double l_hnyb_10 = 722.33;
    double l_hnyb_100 = 1444.66;

    /// Accumulated list size for `items` members, linear through the two
    /// published points (and extrapolated outside them, floored at 0).
    double l_hnyb(double items) const;
    void validate() const;
};

struct CostConstants {
    TimingConstants timing = TimingConstants::defaults();
    LengthConstants lengths{};
};

/// How ambiguous aggregation choices are resolved. The defaults are the
/// project's reading; literal() is the naive one kept for comparison.
struct CostAssumptions {
    /// Accumulated: one accumulator of size L_HNyb(|RL_j|) per push.
    /// PerEntry: |RL_j| * L_HNyb(|RL_j|) bits per push.
    enum class PushSize { Accumulated, PerEntry } push = PushSize::Accumulated;
    /// PerAuthentication: the revocation check is part of every
    /// authentication. AmortizedPerSlot: divided by T_RL like the push term.
    enum class RevocationCharge { PerAuthentication, AmortizedPerSlot } revocation = RevocationCharge::PerAuthentication;
    /// Temporal: CPAL checks the whole |RL| (no regional split).
    /// Regional: |RL| / N_eNB, the same apportionment as ReHand.
    enum class CpalScope { Temporal, Regional } cpal = CpalScope::Temporal;
    bool include_tracing = false;

    static CostAssumptions literal();
};

struct ScenarioPoint {
    double v_kmh = 120;
    double r_km = 2;
    double t_exp_s = 600;
    double t_rl_s = 600;
    double revoked_total = 1e6;  // |RL|
    double n_enb = 22'000;
    double c_alpha_ms = 4.36;
    double c_beta_ms = 261.76;
    double frame_bits = 512;
    FrameMode mode = FrameMode::Linear;

    /// |RL_j| = |RL| / N_eNB
    double regional_list_size() const { return revoked_total / n_enb; }
    /// Throws Error(ParamError) on a nonpositive r, T_exp, T_RL, N_eNB or frame.
    void validate() const;
};

struct CostReport {
    Scheme scheme = Scheme::ReHand;
    double alpha_r = 0;
    double comp_ue = 0;
    double comp_sys = 0;
    double comp_revocation = 0;
    double comm = 0;
    double tracing = 0;
    double total = 0;
};

/// min(1, 1/T_exp + v/(r*3600)). Throws Error(ParamError) for r <= 0,
/// T_exp <= 0 or v < 0.
double alpha_r(double v_kmh, double r_km, double t_exp_s);

/// ReHand at the point's own alpha_R.
CostReport rehand_cost(const ScenarioPoint& p, const CostConstants& c = {}, const CostAssumptions& a = {});
/// ReHand with alpha_R supplied directly (clamped to [0, 1] is the caller's job;
/// throws Error(ParamError) outside it).
CostReport rehand_cost_at(double alpha, const ScenarioPoint& p, const CostConstants& c = {}, const CostAssumptions& a = {});
/// Throws Error(ParamError) for Scheme::ReHand.
CostReport baseline_cost(Scheme scheme, const ScenarioPoint& p, const CostConstants& c = {}, const CostAssumptions& a = {});
CostReport scheme_cost(Scheme scheme, const ScenarioPoint& p, const CostConstants& c = {}, const CostAssumptions& a = {});

struct Grid {
    ScenarioPoint base{};
    std::vector<double> t_rl_s;
    std::vector<double> v_kmh;
    bool t_exp_follows_t_rl = true;

    /// T_RL in {60, 120, ..., 3600}, v in {0, 10, ..., 500}.
    static Grid defaults();
    /// Row-major over (T_RL, v).
    std::vector<ScenarioPoint> points() const;
};

struct SweepRow {
    std::size_t index = 0;  // grid index
    ScenarioPoint point;
    CostReport report;
    double reduction = 0;  // (baseline - rehand) / baseline; 0 for ReHand rows
};

struct ReductionSummary {
    Scheme scheme = Scheme::HashHand;
    double min = 0, max = 0, mean = 0;
    double at_min_t_rl = 0, at_min_v = 0;
    std::optional<double> min_t_rl_ge_240;  // only meaningful for HashHand
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<ReductionSummary> summary;  // one per baseline
    /// Grid points where ReHand costs more than some baseline.
    std::vector<std::string> flags;

    const ReductionSummary& summary_for(Scheme s) const;
};

/// Throws Error(ParamError) for an empty grid.
SweepResult reduction_sweep(const std::vector<ScenarioPoint>& grid, const CostConstants& c = {},
                            const CostAssumptions& a = {});

/// One row per (scheme, T_RL, v) with every report field.
void write_sweep_csv(std::ostream& out, const SweepResult& result);
/// Plot-ready series: one row per (T_RL, v) with each scheme's total in a column.
void write_series_csv(std::ostream& out, const SweepResult& result);
/// Reduction summary block, including the three published headline figures.
void write_summary(std::ostream& out, const SweepResult& result);

/// The published headline reductions (HashHand at T_RL >= 240, Time-bound, CPAL).
inline constexpr double kHeadlineHashHand = 0.8292;
inline constexpr double kHeadlineTimeBound = 0.9999;
inline constexpr double kHeadlineCpal = 0.9995;

}  // namespace rehand::cost
