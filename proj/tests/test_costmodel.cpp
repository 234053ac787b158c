#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rehand/costmodel.hpp"
#include "rehand/errors.hpp"
#include "support.hpp"

using namespace rehand;
using namespace rehand::cost;
using testsupport::fixture;

namespace {

bool close(double a, double b, double rel) {
    if (a == b) return true;
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

TEST_CASE("every formula matches the hand re-derivation") {
    std::size_t rows = 0;
    for (const auto& row : fixture("cost_vectors.txt")) {
        ScenarioPoint p;
        p.t_rl_s = std::stod(row[0]);
        p.t_exp_s = p.t_rl_s;
        p.v_kmh = std::stod(row[1]);
        p.mode = frame_mode_from_name(row[2]);
        const CostAssumptions a = row[3] == "literal" ? CostAssumptions::literal() : CostAssumptions{};
        const Scheme s = scheme_from_name(row[4]);
        const CostReport r = scheme_cost(s, p, {}, a);
        CAPTURE(rows);
        CHECK(close(r.alpha_r, std::stod(row[5]), 1e-9));
        CHECK(close(r.comp_ue, std::stod(row[6]), 1e-9));
        CHECK(close(r.comp_sys, std::stod(row[7]), 1e-9));
        CHECK(close(r.comp_revocation, std::stod(row[8]), 1e-9));
        CHECK(close(r.comm, std::stod(row[9]), 1e-9));
        CHECK(close(r.total, std::stod(row[10]), 1e-9));
        ++rows;
    }
    CHECK(rows == 192);
}

TEST_CASE("published spot values") {
    const ScenarioPoint p;
    CHECK(close(baseline_cost(Scheme::HashHand, p).comp_ue, 145.706, 1e-6));
    CHECK(close(baseline_cost(Scheme::TimeBound, p).comp_ue, 4518.9, 1e-6));
    CHECK(close(rehand_cost_at(0.0, p).comp_ue, 0.018, 1e-12));
    CHECK_THROWS_AS(baseline_cost(Scheme::ReHand, p), Error);
}

TEST_CASE("alpha_R endpoints and clamp") {
    CHECK(std::fabs(alpha_r(0, 2, 3600) - 2.78e-4) <= 1e-5);
    CHECK(std::fabs(alpha_r(500, 2, 60) - 8.6e-2) <= 1e-3);
    CHECK(alpha_r(1e7, 2, 600) == 1.0);
    CHECK_THROWS_AS(alpha_r(10, 0, 600), Error);
    CHECK_THROWS_AS(alpha_r(10, 2, 0), Error);
    CHECK_THROWS_AS(alpha_r(-1, 2, 600), Error);
    CHECK_THROWS_AS(rehand_cost_at(1.5, ScenarioPoint{}), Error);
}

TEST_CASE("ReHand structure") {
    ScenarioPoint p;
    const LengthConstants L;
    SUBCASE("full mobility drops the list push") {
        const auto r1 = rehand_cost_at(1.0, p);
        const double expect = p.c_alpha_ms * (3 * L.l_id + 3 * L.l_k + L.l_t) / 512 +
                              p.c_beta_ms * (3 * L.l_id + 4 * L.l_k + L.l_t) / 512;
        CHECK(close(r1.comm, expect, 1e-12));
    }
    SUBCASE("no mobility: local flow plus the amortized push") {
        const auto r0 = rehand_cost_at(0.0, p);
        const double push = L.l_hnyb(p.regional_list_size());
        const double expect = p.c_alpha_ms * (L.l_id + 2 * L.l_h + 2 * L.l_n + L.l_t) / 512 +
                              (1 / p.t_rl_s) * p.c_beta_ms * push / 512;
        CHECK(close(r0.comm, expect, 1e-12));
    }
    SUBCASE("total is non-decreasing in alpha_R") {
        for (auto mode : {FrameMode::Linear, FrameMode::Ceil}) {
            p.mode = mode;
            double prev = -1;
            for (int i = 0; i <= 100; ++i) {
                const double t = rehand_cost_at(i / 100.0, p).total;
                CHECK(t >= prev);
                prev = t;
            }
        }
    }
    SUBCASE("tracing is zero and excluded by default") {
        CostAssumptions a;
        a.include_tracing = true;
        CHECK(rehand_cost(p, {}, a).tracing == 0.0);
    }
    SUBCASE("report adds up") {
        const auto r = rehand_cost(p);
        CHECK(close(r.total, r.comp_ue + r.comp_sys + r.comp_revocation + r.comm, 1e-12));
    }
}

TEST_CASE("list length interpolation") {
    const LengthConstants L;
    CHECK(L.l_hnyb(10) == doctest::Approx(722.33));
    CHECK(L.l_hnyb(100) == doctest::Approx(1444.66));
    CHECK(L.l_hnyb(55) == doctest::Approx((722.33 + 1444.66) / 2));
    CHECK(L.l_hnyb(-1000) == 0.0);
}

TEST_CASE("CPAL broadcast term scales with 1/T_RL") {
    ScenarioPoint a, b;
    a.t_rl_s = a.t_exp_s = 60;
    b.t_rl_s = b.t_exp_s = 3600;
    CHECK(baseline_cost(Scheme::Cpal, a).comm > baseline_cost(Scheme::Cpal, b).comm);
    CHECK(baseline_cost(Scheme::HashHand, a).comp_revocation == 0.0);
}

TEST_CASE("sweep over a small grid") {
    Grid g = Grid::defaults();
    CHECK(g.t_rl_s.size() == 60);
    CHECK(g.v_kmh.size() == 51);
    g.t_rl_s = {60, 600};
    g.v_kmh = {0, 250};
    const auto pts = g.points();
    REQUIRE(pts.size() == 4);
    CHECK(pts[1].t_rl_s == 60);
    CHECK(pts[1].v_kmh == 250);
    CHECK(pts[2].t_exp_s == 600);

    const auto res = reduction_sweep(pts);
    CHECK(res.rows.size() == 16);
    CHECK(res.summary.size() == 3);
    for (const auto& row : res.rows) {
        if (row.report.scheme == Scheme::ReHand) continue;
        CHECK(row.reduction > 0.0);
        CHECK(row.reduction < 1.0);
    }
    CHECK(res.summary_for(Scheme::TimeBound).min >= 0.999);
    CHECK(res.flags.empty());

    std::ostringstream csv, series, summary;
    write_sweep_csv(csv, res);
    write_series_csv(series, res);
    write_summary(summary, res);
    std::size_t lines = 0;
    for (char c : csv.str()) lines += c == '\n';
    CHECK(lines == 17);
    lines = 0;
    for (char c : series.str()) lines += c == '\n';
    CHECK(lines == 5);
    CHECK(summary.str().find("HashHand") != std::string::npos);
    CHECK_THROWS_AS(reduction_sweep({}), Error);
}

TEST_CASE("names and validation") {
    CHECK(scheme_from_name("time-bound") == Scheme::TimeBound);
    CHECK(scheme_from_name("cpal") == Scheme::Cpal);
    CHECK_THROWS_AS(scheme_from_name("nope"), Error);
    CHECK(frame_mode_from_name("ceil") == FrameMode::Ceil);
    CHECK_THROWS_AS(frame_mode_from_name("round"), Error);
    ScenarioPoint p;
    p.frame_bits = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    TimingConstants t = TimingConstants::defaults();
    CHECK(t.system.t_h == t.ue.t_h);
    CHECK(t.ue.t_m == t.system.t_m);
    t.ue.t_p = -1;
    CHECK_THROWS_AS(t.validate(), Error);
}
