#include "rehand/anonymity.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "rehand/errors.hpp"
#include "rehand/protocol.hpp"

namespace rehand::anon {

std::uint32_t ObservationSet::sessions_per_ue() const {
    if (b == 0) return 0;
    std::vector<std::uint32_t> counts(b, 0);
    for (const auto& o : observations) {
        if (o.true_ue < b) ++counts[o.true_ue];
    }
    return std::all_of(counts.begin(), counts.end(), [&](auto c) { return c == counts[0]; }) ? counts[0] : 0;
}

void ObservationSet::validate() const {
    if (k == 0) throw Error(Errc::ParamError, "k = 0: no blind factors");
    if (b == 0) throw Error(Errc::ParamError, "b = 0: no identities");
    for (const auto& o : observations) {
        if (o.index < 1 || o.index > k) throw Error(Errc::ParamError, "blind index " + std::to_string(o.index) + " outside [1, k]");
        if (o.true_ue >= b) throw Error(Errc::ParamError, "identity label " + std::to_string(o.true_ue) + " outside [0, b)");
    }
}

XorSystem::XorSystem(std::size_t b, std::size_t k) : b_(b), k_(k), words_((b + k + 63) / 64) {}

void XorSystem::add_row(std::size_t ue, std::size_t index, const AnonId& rhs) {
    if (ue >= b_) throw Error(Errc::ParamError, "identity column out of range");
    if (index < 1 || index > k_) throw Error(Errc::ParamError, "blind index out of range");
    std::vector<std::uint64_t> row(words_, 0);
    const std::size_t cols[2] = {ue, b_ + index - 1};
    for (auto c : cols) row[c / 64] |= std::uint64_t{1} << (c % 64);
    rows_.push_back(std::move(row));
    rhs_.push_back(rhs);
}

bool XorSystem::coefficient(std::size_t row, std::size_t column) const {
    return (rows_.at(row).at(column / 64) >> (column % 64)) & 1u;
}

XorSystem::Reduction XorSystem::reduce() const {
    auto m = rows_;
    auto r = rhs_;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < columns() && rank < m.size(); ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t pivot = rank;
        while (pivot < m.size() && !(m[pivot][w] & bit)) ++pivot;
        if (pivot == m.size()) continue;
        std::swap(m[pivot], m[rank]);
        std::swap(r[pivot], r[rank]);
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (i == rank || !(m[i][w] & bit)) continue;
            for (std::size_t j = 0; j < words_; ++j) m[i][j] ^= m[rank][j];
            r[i] = r[i] ^ block_cast<BlindFactor>(r[rank]);
        }
        ++rank;
    }
    Reduction out{rank, true};
    const AnonId zero{};
    for (std::size_t i = rank; i < m.size(); ++i) {
        if (!(r[i] == zero)) out.consistent = false;
    }
    return out;
}

XorSystem build_system(const ObservationSet& obs, const std::vector<std::uint32_t>& assignment) {
    if (assignment.size() != obs.observations.size()) throw Error(Errc::ParamError, "assignment must cover every observation");
    XorSystem sys(obs.b, obs.k);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        sys.add_row(assignment[i], obs.observations[i].index, obs.observations[i].lambda);
    }
    return sys;
}

std::vector<std::uint32_t> true_assignment(const ObservationSet& obs) {
    std::vector<std::uint32_t> out;
    out.reserve(obs.observations.size());
    for (const auto& o : obs.observations) out.push_back(o.true_ue);
    return out;
}

std::size_t solution_space_dim(const XorSystem& sys) {
    const auto red = sys.reduce();
    if (!red.consistent) throw Error(Errc::Inconsistent, "observations admit no solution under this assignment");
    return sys.columns() - red.rank;
}

bool is_unlinkable(const ObservationSet& obs) {
    if (obs.k == 0) throw Error(Errc::ParamError, "k = 0: no blind factors");
    return solution_space_dim(build_system(obs, true_assignment(obs))) >= 1;
}

Verdict analyse(const ObservationSet& obs, std::uint32_t region) {
    obs.validate();
    const auto sys = build_system(obs, true_assignment(obs));
    const auto red = sys.reduce();
    if (!red.consistent) throw Error(Errc::Inconsistent, "region " + std::to_string(region) + " observations are inconsistent");
    Verdict v;
    v.region = region;
    v.observations = obs.observations.size();
    v.b = obs.b;
    v.k = obs.k;
    v.a = obs.sessions_per_ue();
    v.rank = red.rank;
    v.dim = sys.columns() - red.rank;
    v.exposed = sys.rows() - red.rank;
    v.bound_holds = static_cast<std::int64_t>(obs.k) > obs.lemma_bound();
    v.unlinkable = v.dim >= 1;
    return v;
}

void write_verdict(std::ostream& out, const Verdict& v) {
    out << "region=" << v.region << " a=" << v.a << " b=" << v.b << " k=" << v.k << " n=" << v.observations
        << " rank=" << v.rank << " dim=" << v.dim << " exposed=" << v.exposed
        << " bound=" << (v.bound_holds ? "k>ab-b" : "k<=ab-b") << " verdict=" << (v.unlinkable ? "unlinkable" : "linkable")
        << '\n';
}

ObservationSet generate_observations(std::uint32_t a, std::uint32_t b, std::uint16_t k, RandomSource& rng) {
    if (k == 0) throw Error(Errc::ParamError, "k = 0: no blind factors");
    ProtocolParams params;
    params.warrant_lifetime_ms = 3'600'000;
    params.slot_ms = 3'600'000;
    Hss hss(params, rng);
    const RegionId region = 1;
    Henb henb(hss.provision_region(region, k, rng), params);
    Mme mme;
    Enb enb(region);

    ObservationSet out;
    out.b = b;
    out.k = k;
    const Timestamp now{1000};
    SessionId sid = 0;
    for (std::uint32_t u = 0; u < b; ++u) {
        UeIdentity id;
        auto idb = be64(u + 1);
        std::copy(idb.begin(), idb.end(), id.bytes().begin() + 8);
        Ue ue(hss.register_ue(id, rng));
        auto core = hss.handle_initial(ue.begin_initial(rng), region, now, rng);
        ue.complete_initial(relay_key_chain(core, mme, enb, henb, ++sid).to_ue, region, now);
        for (std::uint32_t s = 0; s < a; ++s) {
            FastRequest req = ue.begin_fast(rng);
            out.observations.push_back(Observation{req.lambda, req.index, u});
            auto ch = henb.handle_fast(req, now, rng);
            henb.confirm(ch.session, ue.handle_challenge(ch.challenge), ++sid);
        }
    }
    return out;
}

}  // namespace rehand::anon
