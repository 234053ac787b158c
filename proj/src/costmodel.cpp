#include "rehand/costmodel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "rehand/errors.hpp"

namespace rehand::cost {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

void require_positive(double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw Error(Errc::ParamError, std::string(name) + " must be positive and finite");
}

void validate_side(const SideTimings& s, const char* side) {
    const std::pair<double, const char*> all[] = {{s.t_se, "T_SE"}, {s.t_h, "T_H"},   {s.t_e, "T_e"},   {s.t_m, "T_m"},
                                                  {s.t_p, "T_p"},   {s.t_me, "T_me"}, {s.t_ph, "T_pH"}, {s.t_inv, "T_Inv"}};
    for (const auto& [v, name] : all) require_positive(v, (std::string(side) + " " + name).c_str());
}

// Time to move `bits` across a hop class of latency c.
double frames(double bits, double c, const ScenarioPoint& p) {
    const double units = bits / p.frame_bits;
    return c * (p.mode == FrameMode::Ceil ? std::ceil(units) : units);
}

CostReport finish(CostReport r, const CostAssumptions& a) {
    r.total = r.comp_ue + r.comp_sys + r.comp_revocation + r.comm + (a.include_tracing ? r.tracing : 0.0);
    return r;
}

double revocation_charge(double per_check, const ScenarioPoint& p, const CostAssumptions& a) {
    return a.revocation == CostAssumptions::RevocationCharge::AmortizedPerSlot ? per_check / p.t_rl_s : per_check;
}

}  // namespace

std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ReHand: return "ReHand";
        case Scheme::HashHand: return "HashHand";
        case Scheme::TimeBound: return "TimeBound";
        case Scheme::Cpal: return "CPAL";
    }
    return "?";
}

Scheme scheme_from_name(std::string_view name) {
    const auto n = lower(name);
    if (n == "rehand") return Scheme::ReHand;
    if (n == "hashhand") return Scheme::HashHand;
    if (n == "timebound" || n == "time-bound") return Scheme::TimeBound;
    if (n == "cpal") return Scheme::Cpal;
    throw Error(Errc::ParamError, "unknown scheme '" + std::string(name) + "'");
}

std::string_view frame_mode_name(FrameMode m) {
    return m == FrameMode::Linear ? "linear" : "ceil";
}

FrameMode frame_mode_from_name(std::string_view name) {
    const auto n = lower(name);
    if (n == "linear") return FrameMode::Linear;
    if (n == "ceil" || n == "per-flow-ceil") return FrameMode::Ceil;
    throw Error(Errc::ParamError, "unknown frame mode '" + std::string(name) + "' (linear|ceil)");
}

TimingConstants TimingConstants::defaults() {
    TimingConstants t;
    t.ue.t_se = 6.8e-3;
    t.ue.t_h = 6e-3;
    t.ue.t_e = 70.1;
    t.ue.t_inv = 70.1;
    t.ue.t_p = 135.5;
    t.ue.t_me = 105.15;
    t.ue.t_ph = 10.2;

    t.system.t_se = t.ue.t_se;
    t.system.t_h = t.ue.t_h;
    t.system.t_e = 9.505;
    t.system.t_inv = 9.505;
    t.system.t_m = 9.556;
    t.system.t_p = 5.065;
    t.system.t_me = 14.257;
    t.system.t_ph = 1.413;

    t.ue.t_m = t.system.t_m;
    return t;
}

void TimingConstants::validate() const {
    validate_side(ue, "UE");
    validate_side(system, "system");
}

double LengthConstants::l_hnyb(double items) const {
    const double slope = (l_hnyb_100 - l_hnyb_10) / 90.0;
    return std::max(0.0, l_hnyb_10 + (items - 10.0) * slope);
}

void LengthConstants::validate() const {
    const std::pair<double, const char*> all[] = {{l_id, "L_ID"}, {l_n, "L_N"}, {l_h, "L_H"},         {l_k, "L_K"},
                                                  {l_g, "L_G"},   {l_p, "L_p"}, {l_t, "L_T"},         {l_hnyb_10, "L_HNyb(10)"},
                                                  {l_hnyb_100, "L_HNyb(100)"}};
    for (const auto& [v, name] : all) require_positive(v, name);
}

CostAssumptions CostAssumptions::literal() {
    CostAssumptions a;
    a.push = PushSize::PerEntry;
    a.revocation = RevocationCharge::AmortizedPerSlot;
    a.cpal = CpalScope::Regional;
    return a;
}

void ScenarioPoint::validate() const {
    if (v_kmh < 0 || !std::isfinite(v_kmh)) throw Error(Errc::ParamError, "v must be >= 0");
    require_positive(r_km, "r");
    require_positive(t_exp_s, "T_exp");
    require_positive(t_rl_s, "T_RL");
    require_positive(n_enb, "N_eNB");
    require_positive(frame_bits, "frame_bits");
    if (revoked_total < 0) throw Error(Errc::ParamError, "|RL| must be >= 0");
    if (c_alpha_ms < 0 || c_beta_ms < 0) throw Error(Errc::ParamError, "hop latencies must be >= 0");
}

double alpha_r(double v_kmh, double r_km, double t_exp_s) {
    if (!(r_km > 0)) throw Error(Errc::ParamError, "r must be positive");
    if (!(t_exp_s > 0)) throw Error(Errc::ParamError, "T_exp must be positive");
    if (!(v_kmh >= 0)) throw Error(Errc::ParamError, "v must be >= 0");
    return std::min(1.0, 1.0 / t_exp_s + v_kmh / (r_km * 3600.0));
}

CostReport rehand_cost(const ScenarioPoint& p, const CostConstants& c, const CostAssumptions& a) {
    p.validate();
    return rehand_cost_at(alpha_r(p.v_kmh, p.r_km, p.t_exp_s), p, c, a);
}

CostReport rehand_cost_at(double alpha, const ScenarioPoint& p, const CostConstants& c, const CostAssumptions& a) {
    if (!(alpha >= 0 && alpha <= 1)) throw Error(Errc::ParamError, "alpha_R must lie in [0, 1]");
    p.validate();
    const auto& u = c.timing.ue;
    const auto& s = c.timing.system;
    const auto& L = c.lengths;
    const double rl_j = p.regional_list_size();

    CostReport r;
    r.scheme = Scheme::ReHand;
    r.alpha_r = alpha;
    r.comp_ue = alpha * (2 * u.t_se + 4 * u.t_h) + (1 - alpha) * 3 * u.t_h;
    r.comp_sys = alpha * (2 * s.t_se + 5 * s.t_h) + (1 - alpha) * 5 * s.t_h;
    r.comp_revocation = revocation_charge(rl_j * s.t_h, p, a);

    const double push_bits =
        a.push == CostAssumptions::PushSize::Accumulated ? L.l_hnyb(rl_j) : rl_j * L.l_hnyb(rl_j);
    const double initial = frames(3 * L.l_id + 3 * L.l_k + L.l_t, p.c_alpha_ms, p) +
                           frames(3 * L.l_id + 4 * L.l_k + L.l_t, p.c_beta_ms, p);
    const double fast = frames(L.l_id + 2 * L.l_h + 2 * L.l_n + L.l_t, p.c_alpha_ms, p) +
                        frames(push_bits, p.c_beta_ms, p) / p.t_rl_s;
    r.comm = alpha * initial + (1 - alpha) * fast;
    r.tracing = 0;
    return finish(r, a);
}

CostReport baseline_cost(Scheme scheme, const ScenarioPoint& p, const CostConstants& c, const CostAssumptions& a) {
    p.validate();
    const auto& u = c.timing.ue;
    const auto& s = c.timing.system;
    const auto& L = c.lengths;

    CostReport r;
    r.scheme = scheme;
    r.alpha_r = alpha_r(p.v_kmh, p.r_km, p.t_exp_s);
    switch (scheme) {
        case Scheme::HashHand:
            r.comp_ue = u.t_ph + u.t_h + u.t_p;
            r.comp_sys = s.t_ph + 2 * s.t_h + s.t_p;
            r.comp_revocation = 0;
            r.comm = frames(2 * L.l_id + L.l_n + 2 * L.l_h, p.c_alpha_ms, p) +
                     frames(2 * L.l_id + L.l_n + L.l_h, p.c_beta_ms, p);
            r.tracing = s.t_ph + s.t_h + s.t_p;
            break;
        case Scheme::TimeBound:
            r.comp_ue = 49 * u.t_e + 8 * u.t_p;
            r.comp_sys = 46 * s.t_e + 6 * s.t_p;
            r.comp_revocation = revocation_charge(p.revoked_total * s.t_e, p, a);
            r.comm = frames((11 * L.l_g + 13 * L.l_p + L.l_id + L.l_h) + 2 * L.l_g, p.c_alpha_ms, p);
            r.tracing = p.revoked_total * s.t_e;
            break;
        case Scheme::Cpal: {
            const double rl_t =
                a.cpal == CostAssumptions::CpalScope::Temporal ? p.revoked_total : p.regional_list_size();
            r.comp_ue = 3 * u.t_e + 10 * u.t_me;
            r.comp_sys = s.t_e + 7 * s.t_me + s.t_p;
            r.comp_revocation =
                revocation_charge(4 * rl_t * s.t_m + rl_t * (s.t_me + s.t_e) + s.t_inv, p, a);
            r.comm = frames(15 * L.l_g + L.l_t, p.c_alpha_ms, p) +
                     frames(L.l_g, p.c_alpha_ms + p.c_beta_ms, p) / p.t_rl_s + frames(3 * L.l_g, p.c_beta_ms, p);
            r.tracing = 4 * s.t_me + 2 * s.t_p;
            break;
        }
        case Scheme::ReHand:
            throw Error(Errc::ParamError, "ReHand is not a baseline; use rehand_cost");
    }
    return finish(r, a);
}

CostReport scheme_cost(Scheme scheme, const ScenarioPoint& p, const CostConstants& c, const CostAssumptions& a) {
    return scheme == Scheme::ReHand ? rehand_cost(p, c, a) : baseline_cost(scheme, p, c, a);
}

Grid Grid::defaults() {
    Grid g;
    for (int t = 60; t <= 3600; t += 60) g.t_rl_s.push_back(t);
    for (int v = 0; v <= 500; v += 10) g.v_kmh.push_back(v);
    return g;
}

std::vector<ScenarioPoint> Grid::points() const {
    std::vector<ScenarioPoint> out;
    out.reserve(t_rl_s.size() * v_kmh.size());
    for (double t : t_rl_s) {
        for (double v : v_kmh) {
            ScenarioPoint p = base;
            p.t_rl_s = t;
            p.v_kmh = v;
            if (t_exp_follows_t_rl) p.t_exp_s = t;
            out.push_back(p);
        }
    }
    return out;
}

const ReductionSummary& SweepResult::summary_for(Scheme s) const {
    for (const auto& r : summary) {
        if (r.scheme == s) return r;
    }
    throw Error(Errc::ParamError, "no summary for " + std::string(scheme_name(s)));
}

SweepResult reduction_sweep(const std::vector<ScenarioPoint>& grid, const CostConstants& c, const CostAssumptions& a) {
    if (grid.empty()) throw Error(Errc::ParamError, "empty cost grid");
    c.timing.validate();
    c.lengths.validate();

    SweepResult out;
    std::map<Scheme, ReductionSummary> sums;
    std::map<Scheme, std::size_t> counts;
    for (Scheme b : kBaselines) {
        sums[b].scheme = b;
        sums[b].min = 2.0;
        sums[b].max = -2.0;
    }

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const ScenarioPoint& p = grid[i];
        const CostReport rh = rehand_cost(p, c, a);
        out.rows.push_back(SweepRow{i, p, rh, 0.0});
        for (Scheme b : kBaselines) {
            const CostReport br = baseline_cost(b, p, c, a);
            const double red = (br.total - rh.total) / br.total;
            out.rows.push_back(SweepRow{i, p, br, red});
            auto& s = sums[b];
            if (red < s.min) {
                s.min = red;
                s.at_min_t_rl = p.t_rl_s;
                s.at_min_v = p.v_kmh;
            }
            s.max = std::max(s.max, red);
            s.mean += red;
            ++counts[b];
            if (p.t_rl_s >= 240) s.min_t_rl_ge_240 = std::min(s.min_t_rl_ge_240.value_or(2.0), red);
            if (rh.total > br.total) {
                std::ostringstream f;
                f << "ReHand exceeds " << scheme_name(b) << " at T_RL=" << p.t_rl_s << " v=" << p.v_kmh;
                out.flags.push_back(f.str());
            }
        }
    }
    for (Scheme b : kBaselines) {
        auto s = sums[b];
        s.mean /= static_cast<double>(counts[b]);
        out.summary.push_back(s);
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "index,scheme,t_rl_s,v_kmh,r_km,t_exp_s,mode,alpha_r,comp_ue,comp_sys,comp_revocation,comm,tracing,total,"
           "reduction_vs_rehand\n";
    out << std::setprecision(12);
    for (const auto& row : result.rows) {
        const auto& p = row.point;
        const auto& r = row.report;
        out << row.index << ',' << scheme_name(r.scheme) << ',' << p.t_rl_s << ',' << p.v_kmh << ',' << p.r_km << ','
            << p.t_exp_s << ',' << frame_mode_name(p.mode) << ',' << r.alpha_r << ',' << r.comp_ue << ',' << r.comp_sys
            << ',' << r.comp_revocation << ',' << r.comm << ',' << r.tracing << ',' << r.total << ',' << row.reduction
            << '\n';
    }
}

void write_series_csv(std::ostream& out, const SweepResult& result) {
    out << "t_rl_s,v_kmh,alpha_r,ReHand,HashHand,TimeBound,CPAL\n";
    out << std::setprecision(12);
    std::map<std::size_t, std::map<Scheme, const SweepRow*>> by_point;
    for (const auto& row : result.rows) by_point[row.index][row.report.scheme] = &row;
    for (const auto& [idx, m] : by_point) {
        const auto* rh = m.at(Scheme::ReHand);
        out << rh->point.t_rl_s << ',' << rh->point.v_kmh << ',' << rh->report.alpha_r;
        for (Scheme s : kAllSchemes) {
            auto it = m.find(s);
            out << ',';
            if (it != m.end()) out << it->second->report.total;
        }
        out << '\n';
    }
}

void write_summary(std::ostream& out, const SweepResult& result) {
    out << std::fixed << std::setprecision(6);
    for (const auto& s : result.summary) {
        out << "reduction vs " << scheme_name(s.scheme) << ": min " << s.min << " (T_RL=" << s.at_min_t_rl
            << ", v=" << s.at_min_v << ") mean " << s.mean << " max " << s.max;
        if (s.scheme == Scheme::HashHand && s.min_t_rl_ge_240) out << " min[T_RL>=240] " << *s.min_t_rl_ge_240;
        out << '\n';
    }
    out << "published headline: HashHand " << kHeadlineHashHand << " TimeBound " << kHeadlineTimeBound << " CPAL "
        << kHeadlineCpal << '\n';
    out << "flags: " << result.flags.size() << '\n';
    out.unsetf(std::ios::floatfield);
}

}  // namespace rehand::cost
