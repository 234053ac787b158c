#include "rehand/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rehand/errors.hpp"

namespace rehand::sim {

std::string_view hop_class_name(HopClass h) {
    switch (h) {
        case HopClass::Alpha: return "alpha";
        case HopClass::X2: return "x2";
        case HopClass::Beta: return "beta";
        case HopClass::Core: return "core";
    }
    return "?";
}

double LatencyMap::of(HopClass h) const {
    switch (h) {
        case HopClass::Alpha: return c_alpha_ms;
        case HopClass::X2: return x2_ms;
        case HopClass::Beta: return c_beta_ms;
        case HopClass::Core: return core_ms;
    }
    return 0;
}

std::string_view fault_kind_name(FaultKind k) {
    switch (k) {
        case FaultKind::Drop: return "drop";
        case FaultKind::Corrupt: return "corrupt";
        case FaultKind::Replay: return "replay";
    }
    return "?";
}

namespace {

[[noreturn]] void fail(const std::string& origin, const YAML::Node& node, const std::string& field, const std::string& why) {
    std::ostringstream os;
    os << origin;
    if (node && node.Mark().line >= 0) os << ':' << node.Mark().line + 1;
    os << ": " << (field.empty() ? "<root>" : field) << ": " << why;
    throw Error(Errc::ConfigError, os.str());
}

// A mapping plus its dotted path; every key read is remembered so leftovers
// can be reported as unknown.
class Section {
public:
    Section(const std::string& origin, YAML::Node node, std::string path)
        : origin_(origin), node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) fail(origin_, node_, path_, "expected a mapping");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return node_[key];
    }

    template <class T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        out = scalar<T>(node_[key], field(key));
    }

    template <class T>
    T scalar(const YAML::Node& n, const std::string& fld) const {
        if (!n.IsScalar()) fail(origin_, n, fld, "expected a scalar");
        try {
            if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
                const auto s = n.as<std::string>();
                if (!s.empty() && s[0] == '-') fail(origin_, n, fld, "must be non-negative");
                const auto v = n.as<std::uint64_t>();
                if (v > std::numeric_limits<T>::max()) fail(origin_, n, fld, "out of range");
                return static_cast<T>(v);
            } else if constexpr (std::is_floating_point_v<T>) {
                const auto v = n.as<T>();
                if (!std::isfinite(v)) fail(origin_, n, fld, "must be finite");
                return v;
            } else {
                return n.as<T>();
            }
        } catch (const YAML::BadConversion&) {
            fail(origin_, n, fld, "cannot convert '" + n.Scalar() + "'");
        }
    }

    Section child(const std::string& key) { return Section(origin_, raw(key), field(key)); }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            const auto key = it->first.as<std::string>();
            if (!seen_.count(key)) fail(origin_, it->first, field(key), "unknown key");
        }
    }

    const std::string& origin() const { return origin_; }
    const YAML::Node& node() const { return node_; }

private:
    const std::string& origin_;
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> read_axis(Section& s, const std::string& key) {
    YAML::Node n = s.raw(key);
    const auto fld = s.field(key);
    std::vector<double> out;
    if (n.IsSequence()) {
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(s.scalar<double>(n[i], fld + "[" + std::to_string(i) + "]"));
    } else if (n.IsMap()) {
        Section r(s.origin(), n, fld);
        double from = 0, to = 0, step = 0;
        r.read("from", from);
        r.read("to", to);
        r.read("step", step);
        r.finish();
        if (!(step > 0)) fail(s.origin(), n, fld + ".step", "must be positive");
        if (to < from) fail(s.origin(), n, fld + ".to", "must be >= from");
        for (std::size_t i = 0;; ++i) {
            const double v = from + static_cast<double>(i) * step;
            if (v > to + 1e-9 * std::max(1.0, std::abs(to))) break;
            out.push_back(v);
        }
    } else if (n.IsScalar()) {
        out.push_back(s.scalar<double>(n, fld));
    } else {
        fail(s.origin(), n, fld, "expected a list, a {from, to, step} range or a number");
    }
    if (out.empty()) fail(s.origin(), n, fld, "axis is empty");
    return out;
}

void read_side(Section& s, cost::SideTimings& t) {
    s.read("t_se", t.t_se);
    s.read("t_h", t.t_h);
    s.read("t_e", t.t_e);
    s.read("t_m", t.t_m);
    s.read("t_p", t.t_p);
    s.read("t_me", t.t_me);
    s.read("t_ph", t.t_ph);
    s.read("t_inv", t.t_inv);
    s.finish();
}

void read_costs(Section& s, CostSettings& c) {
    auto& base = c.grid.base;
    if (s.has("mode")) {
        try {
            base.mode = cost::frame_mode_from_name(s.scalar<std::string>(s.raw("mode"), s.field("mode")));
        } catch (const Error& e) {
            fail(s.origin(), s.raw("mode"), s.field("mode"), e.what());
        }
    }
    s.read("c_alpha_ms", base.c_alpha_ms);
    s.read("c_beta_ms", base.c_beta_ms);
    s.read("frame_bits", base.frame_bits);
    s.read("include_tracing", c.assumptions.include_tracing);

    if (s.has("grid")) {
        Section g = s.child("grid");
        if (g.has("t_rl_s")) c.grid.t_rl_s = read_axis(g, "t_rl_s");
        if (g.has("v_kmh")) c.grid.v_kmh = read_axis(g, "v_kmh");
        g.read("r_km", base.r_km);
        g.read("revoked_total", base.revoked_total);
        g.read("n_enb", base.n_enb);
        if (g.has("t_exp_s")) {
            g.read("t_exp_s", base.t_exp_s);
            c.grid.t_exp_follows_t_rl = false;
        }
        g.finish();
    }

    if (s.has("assumptions")) {
        YAML::Node an = s.raw("assumptions");
        if (an.IsScalar()) {
            const auto preset = s.scalar<std::string>(an, s.field("assumptions"));
            if (preset == "literal") {
                const bool tracing = c.assumptions.include_tracing;
                c.assumptions = cost::CostAssumptions::literal();
                c.assumptions.include_tracing = tracing;
            } else if (preset != "default") {
                fail(s.origin(), an, s.field("assumptions"), "expected 'default', 'literal' or a mapping");
            }
        } else {
            Section a = s.child("assumptions");
            using A = cost::CostAssumptions;
            auto choice = [&](const std::string& key, const std::map<std::string, std::function<void()>>& opts) {
                if (!a.has(key)) return;
                const auto v = a.scalar<std::string>(a.raw(key), a.field(key));
                auto it = opts.find(v);
                if (it == opts.end()) {
                    std::string names;
                    for (const auto& [n, f] : opts) names += (names.empty() ? "" : "|") + n;
                    fail(a.origin(), a.raw(key), a.field(key), "expected one of " + names);
                }
                it->second();
            };
            choice("push", {{"accumulated", [&] { c.assumptions.push = A::PushSize::Accumulated; }},
                            {"per-entry", [&] { c.assumptions.push = A::PushSize::PerEntry; }}});
            choice("revocation", {{"per-authentication", [&] { c.assumptions.revocation = A::RevocationCharge::PerAuthentication; }},
                                  {"amortized", [&] { c.assumptions.revocation = A::RevocationCharge::AmortizedPerSlot; }}});
            choice("cpal", {{"temporal", [&] { c.assumptions.cpal = A::CpalScope::Temporal; }},
                            {"regional", [&] { c.assumptions.cpal = A::CpalScope::Regional; }}});
            a.finish();
        }
    }

    if (s.has("constants")) {
        Section k = s.child("constants");
        if (k.has("ue")) {
            Section u = k.child("ue");
            read_side(u, c.constants.timing.ue);
        }
        if (k.has("system")) {
            Section u = k.child("system");
            read_side(u, c.constants.timing.system);
        }
        if (k.has("lengths")) {
            Section l = k.child("lengths");
            auto& L = c.constants.lengths;
            l.read("l_id", L.l_id);
            l.read("l_n", L.l_n);
            l.read("l_h", L.l_h);
            l.read("l_k", L.l_k);
            l.read("l_g", L.l_g);
            l.read("l_p", L.l_p);
            l.read("l_t", L.l_t);
            l.read("l_hnyb_10", L.l_hnyb_10);
            l.read("l_hnyb_100", L.l_hnyb_100);
            l.finish();
        }
        k.finish();
    }
    s.finish();
}

FaultSpec read_fault(Section& f) {
    FaultSpec spec;
    const auto kind = f.has("kind") ? f.scalar<std::string>(f.raw("kind"), f.field("kind")) : std::string();
    if (kind == "drop") spec.kind = FaultKind::Drop;
    else if (kind == "corrupt") spec.kind = FaultKind::Corrupt;
    else if (kind == "replay") spec.kind = FaultKind::Replay;
    else fail(f.origin(), f.node(), f.field("kind"), "expected drop|corrupt|replay");

    if (!f.has("flow")) fail(f.origin(), f.node(), f.field("flow"), "required");
    try {
        spec.flow = type_from_name(f.scalar<std::string>(f.raw("flow"), f.field("flow")));
    } catch (const Error& e) {
        fail(f.origin(), f.raw("flow"), f.field("flow"), e.what());
    }
    if (spec.flow == MsgType::Reject) fail(f.origin(), f.raw("flow"), f.field("flow"), "Reject is never sent on the wire");

    const bool is_push = spec.flow == MsgType::RListPush;
    const std::string target_key = is_push ? "push" : "handover";
    if (!f.has(target_key)) fail(f.origin(), f.node(), f.field(target_key), "required for flow " + std::string(type_name(spec.flow)));
    f.read(target_key, spec.target);
    f.has(is_push ? "handover" : "push");
    if (f.node()[is_push ? "handover" : "push"]) {
        fail(f.origin(), f.node()[is_push ? "handover" : "push"], f.field(is_push ? "handover" : "push"),
             "does not apply to flow " + std::string(type_name(spec.flow)));
    }
    if (f.has("bit")) {
        if (spec.kind != FaultKind::Corrupt) fail(f.origin(), f.raw("bit"), f.field("bit"), "only corrupt faults take a bit");
        spec.bit = f.scalar<std::size_t>(f.raw("bit"), f.field("bit"));
    }
    if (spec.kind == FaultKind::Replay && is_push) {
        fail(f.origin(), f.node(), f.field("kind"), "replay applies to handover flows only");
    }
    f.finish();
    return spec;
}

}  // namespace

void ScenarioConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw Error(Errc::ConfigError, field + ": " + why);
    };
    if (topology.regions == 0) bad("topology.regions", "must be >= 1");
    if (topology.henbs_per_region == 0) bad("topology.henbs_per_region", "must be >= 1");
    if (topology.blind_factors == 0) bad("topology.blind_factors", "must be >= 1");
    if (ues == 0) bad("ues", "must be >= 1");
    if (handovers == 0 && duration_s <= 0) bad("handovers", "either handovers or duration_s must be positive");
    if (duration_s < 0) bad("duration_s", "must be >= 0");
    if (mobility.speed_kmh < 0) bad("mobility.speed_kmh", "must be >= 0");
    if (!(mobility.region_diameter_km > 0)) bad("mobility.region_diameter_km", "must be positive");
    if (!(mobility.warrant_lifetime_s > 0)) bad("mobility.warrant_lifetime_s", "must be positive");
    if (mobility.warrant_lifetime_s * 1000.0 >= 1.8e19) bad("mobility.warrant_lifetime_s", "too large");
    if (!(slot_length_s > 0)) bad("revocation.slot_length_s", "must be positive");
    if (std::llround(slot_length_s * 1000.0) <= 0) bad("revocation.slot_length_s", "must be at least 1 ms");
    const std::pair<double, const char*> lat[] = {{latency.c_alpha_ms, "latency.c_alpha_ms"},
                                                  {latency.c_beta_ms, "latency.c_beta_ms"},
                                                  {latency.x2_ms, "latency.x2_ms"},
                                                  {latency.core_ms, "latency.core_ms"}};
    for (const auto& [v, name] : lat) {
        if (v < 0) bad(name, "must be >= 0");
    }
    try {
        acc.validate();
    } catch (const Error& e) {
        bad("revocation.accumulator", e.what());
    }
    for (std::size_t i = 0; i < revocations.size(); ++i) {
        const auto f = "revocation.schedule[" + std::to_string(i) + "]";
        if (revocations[i].ue >= ues) bad(f + ".ue", "refers to a UE that does not exist");
        if (revocations[i].at_s < 0) bad(f + ".at_s", "must be >= 0");
    }
    try {
        costs.constants.timing.validate();
        costs.constants.lengths.validate();
        for (const auto& p : costs.grid.points()) p.validate();
    } catch (const Error& e) {
        bad("costs", e.what());
    }
    if (costs.grid.t_rl_s.empty() || costs.grid.v_kmh.empty()) bad("costs.grid", "grid is empty");
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << origin << ':' << e.mark.line + 1 << ": syntax: " << e.msg;
        throw Error(Errc::ConfigError, os.str());
    }
    if (!root || root.IsNull()) throw Error(Errc::ConfigError, origin + ": empty document");

    ScenarioConfig cfg;
    Section top(origin, root, "");
    top.read("seed", cfg.seed);
    top.read("ues", cfg.ues);
    top.read("handovers", cfg.handovers);
    top.read("duration_s", cfg.duration_s);

    if (top.has("topology")) {
        Section t = top.child("topology");
        t.read("regions", cfg.topology.regions);
        t.read("henbs_per_region", cfg.topology.henbs_per_region);
        t.read("blind_factors", cfg.topology.blind_factors);
        t.finish();
    }
    if (top.has("latency")) {
        Section l = top.child("latency");
        l.read("c_alpha_ms", cfg.latency.c_alpha_ms);
        l.read("c_beta_ms", cfg.latency.c_beta_ms);
        l.read("x2_ms", cfg.latency.x2_ms);
        l.read("core_ms", cfg.latency.core_ms);
        l.finish();
    }
    if (top.has("mobility")) {
        Section m = top.child("mobility");
        m.read("speed_kmh", cfg.mobility.speed_kmh);
        m.read("region_diameter_km", cfg.mobility.region_diameter_km);
        m.read("warrant_lifetime_s", cfg.mobility.warrant_lifetime_s);
        m.finish();
    }
    if (top.has("revocation")) {
        Section r = top.child("revocation");
        r.read("slot_length_s", cfg.slot_length_s);
        r.read("theta_ms", cfg.theta_ms);
        if (r.has("accumulator")) {
            Section a = r.child("accumulator");
            a.read("d", cfg.acc.d);
            a.read("r", cfg.acc.r);
            a.finish();
        }
        if (r.has("schedule")) {
            YAML::Node list = r.raw("schedule");
            if (!list.IsSequence()) fail(origin, list, r.field("schedule"), "expected a list");
            for (std::size_t i = 0; i < list.size(); ++i) {
                Section e(origin, list[i], r.field("schedule") + "[" + std::to_string(i) + "]");
                RevocationEvent ev;
                if (!e.has("ue")) fail(origin, list[i], e.field("ue"), "required");
                if (!e.has("at_s")) fail(origin, list[i], e.field("at_s"), "required");
                e.read("ue", ev.ue);
                e.read("at_s", ev.at_s);
                e.finish();
                cfg.revocations.push_back(ev);
            }
        }
        r.finish();
    }
    if (top.has("faults")) {
        YAML::Node list = top.raw("faults");
        if (!list.IsSequence()) fail(origin, list, "faults", "expected a list");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Section f(origin, list[i], "faults[" + std::to_string(i) + "]");
            cfg.faults.push_back(read_fault(f));
        }
    }
    if (top.has("costs")) {
        Section c = top.child("costs");
        read_costs(c, cfg.costs);
    }
    top.finish();

    try {
        cfg.validate();
    } catch (const Error& e) {
        throw Error(Errc::ConfigError, origin + ": " + e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ConfigError, path.string() + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

}  // namespace rehand::sim
