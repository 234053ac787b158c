#include <doctest.h>

#include <cmath>
#include <sstream>

#include "rehand/errors.hpp"
#include "rehand/simnet.hpp"

using namespace rehand;
using namespace rehand::sim;

namespace {

const char* kOneUe = R"(
seed: 7
ues: 1
handovers: 2
topology: {regions: 1, henbs_per_region: 3, blind_factors: 4}
mobility: {speed_kmh: 0, region_diameter_km: 2, warrant_lifetime_s: 1000000}
revocation: {slot_length_s: 600, theta_ms: 5000}
)";

std::string csv_of(const EventLog& log) {
    std::ostringstream os;
    write_csv(os, log);
    return os.str();
}

std::size_t count_kind(const EventLog& log, HandoverKind k) {
    std::size_t n = 0;
    for (const auto& r : log.records) n += r.kind == k;
    return n;
}

void expect_config_error(const std::string& yaml, const std::string& fragment) {
    try {
        parse_config(yaml, "t.yaml");
        FAIL("config accepted: " << yaml);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
        CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
}

}  // namespace

TEST_CASE("one UE, one move: one initial then one fast handover") {
    const auto log = run_scenario(parse_config(kOneUe));
    REQUIRE(log.records.size() == 2);
    CHECK(log.records[0].kind == HandoverKind::Initial);
    CHECK(log.records[0].cause == Cause::NoWarrant);
    CHECK(log.records[1].kind == HandoverKind::Fast);
    for (const auto& r : log.records) CHECK(r.outcome == kAccepted);
    CHECK(log.records[0].latency_ms() == doctest::Approx(532.24));
    CHECK(log.records[1].latency_ms() == doctest::Approx(13.08));
    CHECK(log.records[0].msgs_beta >= 2);
    CHECK(log.records[1].msgs_beta == 0);
    CHECK(log.records[1].msgs_core == 0);
    CHECK(log.records[1].bits_beta == 0);
    CHECK(log.counters.sent == log.counters.delivered + log.counters.dropped);
    CHECK(log.counters.in_flight_at_end == 0);
    CHECK(core_isolated(log));
}

TEST_CASE("without movement or expiry every later handover is fast") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 60;
    cfg.ues = 3;
    const auto log = run_scenario(cfg);
    CHECK(log.records.size() == 60);
    CHECK(count_kind(log, HandoverKind::Initial) == 3);
    for (const auto& r : log.records) CHECK(r.accepted());
}

TEST_CASE("rates") {
    MobilityProfile m{0, 2, 600};
    CHECK(crossing_rate(m) == 0.0);
    m.speed_kmh = 500;
    CHECK(crossing_rate(m) == doctest::Approx(500.0 / 7200));
    CHECK(expiry_rate(m) == doctest::Approx(1.0 / 600));
    CHECK(handover_rate(m) == 1.0);
    m.speed_kmh = 100'000;
    CHECK(handover_rate(m) == doctest::Approx(100'000.0 / 7200 + 1.0 / 600));

    // long-run kind ratio of the hazard model
    m = MobilityProfile{120, 2, 600};
    RandomSource rng(1);
    std::size_t initial = 0;
    const std::size_t n = 200'000;
    for (std::size_t i = 0; i < n; ++i) initial += next_handover(m, rng).kind == HandoverKind::Initial;
    const double alpha = 1.0 / 600 + 120.0 / 7200;
    CHECK(static_cast<double>(initial) / n == doctest::Approx(alpha).epsilon(0.05));
}

TEST_CASE("same seed, same log; different seed, different log") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 200;
    cfg.ues = 4;
    cfg.topology.regions = 3;
    cfg.mobility = MobilityProfile{120, 2, 600};
    const std::string a = csv_of(run_scenario(cfg));
    CHECK(a == csv_of(run_scenario(cfg)));
    cfg.seed = 8;
    CHECK(a != csv_of(run_scenario(cfg)));
}

TEST_CASE("doubling C_beta only moves the initial handover") {
    auto cfg = parse_config(kOneUe);
    cfg.latency.c_beta_ms *= 2;
    const auto log = run_scenario(cfg);
    REQUIRE(log.records.size() == 2);
    CHECK(log.records[0].latency_ms() == doctest::Approx(532.24 + 2 * 261.76));
    CHECK(log.records[1].latency_ms() == doctest::Approx(13.08));

    const auto stats = measure_latency(log);
    CHECK(stats.at(HandoverKind::Fast).mean == doctest::Approx(13.08));
    CHECK_THROWS_AS(measure_latency(EventLog{}), Error);
}

TEST_CASE("fault injection") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 6;
    auto outcome_of = [&](FaultSpec f) {
        cfg.faults = {f};
        const auto log = run_scenario(cfg);
        CHECK(log.counters.sent == log.counters.delivered + log.counters.dropped);
        CHECK(log.records.size() == 6);
        return log.records.at(f.target).outcome;
    };
    CHECK(outcome_of({FaultKind::Drop, MsgType::FastConfirm, 2, {}}) == kDropped);
    CHECK(outcome_of({FaultKind::Corrupt, MsgType::FastChallenge, 2, 100}) == "ServerAuthFailure");
    CHECK(outcome_of({FaultKind::Corrupt, MsgType::FastConfirm, 2, 40}) == "ClientAuthFailure");
    CHECK(outcome_of({FaultKind::Replay, MsgType::FastRequest, 3, {}}) == "ServerAuthFailure");
    CHECK(outcome_of({FaultKind::Corrupt, MsgType::InitialResponseHenb, 0, 200}) == "AuthFailure");
    // untouched handovers still succeed
    cfg.faults = {{FaultKind::Drop, MsgType::FastConfirm, 2, {}}};
    const auto log = run_scenario(cfg);
    CHECK(log.records[3].accepted());
    CHECK(log.counters.faults_applied == 1);
}

TEST_CASE("a tampered list push is rejected and the old list stays") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 0;
    cfg.duration_s = 1300;
    cfg.topology.henbs_per_region = 2;
    cfg.faults = {{FaultKind::Corrupt, MsgType::RListPush, 0, 40}};
    const auto log = run_scenario(cfg);
    CHECK(log.counters.pushes_rejected == 1);
    CHECK(log.counters.pushes_installed + 1 == log.counters.pushes_delivered);
}

TEST_CASE("revoked UE is refused once the list arrives") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 40;
    cfg.revocations = {{0, 10.0}};
    const auto log = run_scenario(cfg);
    REQUIRE(log.windows.size() == 1);
    CHECK(log.windows[0].accumulated);
    std::size_t refused = 0;
    for (const auto& r : log.records) {
        if (r.start_us > 11'000'000) {
            CHECK_FALSE(r.accepted());
            refused += r.outcome == "RevokedUE";
        }
    }
    CHECK(refused > 0);
    REQUIRE(log.windows[0].last_accept_ms);
    CHECK(*log.windows[0].last_accept_ms < 11'000);
}

TEST_CASE("event log CSV round trip") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 50;
    cfg.ues = 3;
    cfg.topology.regions = 2;
    cfg.mobility = MobilityProfile{300, 2, 600};
    const auto log = run_scenario(cfg);
    const std::string text = csv_of(log);
    CHECK(text.rfind("time,ue,region,kind,outcome,latency_ms,bits_alpha,bits_beta,", 0) == 0);
    std::istringstream in(text);
    const auto back = read_csv(in);
    REQUIRE(back.records.size() == log.records.size());
    CHECK(csv_of(back) == text);
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        CHECK(back.records[i].lambda == log.records[i].lambda);
        CHECK(back.records[i].cause == log.records[i].cause);
    }

    std::istringstream bad("time,ue\n1,2\n");
    CHECK_THROWS_AS(read_csv(bad), Error);
    std::string broken = text;
    broken.insert(broken.find('\n') + 1, "oops,1,2\n");
    std::istringstream in2(broken);
    try {
        read_csv(in2);
        FAIL("accepted a broken row");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("observation sets from a log") {
    auto cfg = parse_config(kOneUe);
    cfg.handovers = 30;
    cfg.ues = 3;
    const auto log = run_scenario(cfg);
    const auto sets = observation_sets(log, 4);
    REQUIRE(sets.size() == 1);
    const auto& obs = sets.at(1);
    CHECK(obs.k == 4);
    CHECK(obs.b == 3);
    CHECK(obs.observations.size() == count_kind(log, HandoverKind::Fast));
    CHECK(anon::true_assignment(obs).size() == obs.observations.size());
    CHECK(anon::solution_space_dim(anon::build_system(obs, anon::true_assignment(obs))) >= 1);
}

TEST_CASE("config diagnostics") {
    const auto cfg = parse_config(kOneUe);
    CHECK(cfg.seed == 7);
    CHECK(cfg.topology.henbs_per_region == 3);
    expect_config_error("seed: 1\nbogus: 2\n", "t.yaml:2");
    expect_config_error("seed: 1\nbogus: 2\n", "bogus");
    expect_config_error("ues: -1\n", "ues");
    expect_config_error("topology: {regions: 0}\n", "topology.regions");
    expect_config_error("mobility: {speed_kmh: -5}\n", "speed_kmh");
    expect_config_error("faults:\n  - {kind: melt, flow: FastRequest, handover: 1}\n", "kind");
    expect_config_error("faults:\n  - {kind: drop, flow: Nope, handover: 1}\n", "flow");
    expect_config_error("revocation: {accumulator: {d: 0, r: 8}}\n", "accumulator");
    expect_config_error("costs: {mode: round}\n", "mode");
    expect_config_error("seed: [1\n", "t.yaml");
    CHECK_THROWS_AS(load_config("/nonexistent/x.yaml"), Error);

    const auto c = parse_config("costs:\n  assumptions: literal\n  grid: {t_rl_s: [60, 120], v_kmh: 5}\n");
    CHECK(c.costs.grid.points().size() == 2);
    CHECK(c.costs.assumptions.push == cost::CostAssumptions::PushSize::PerEntry);
}

TEST_CASE("the shipped example config loads and runs cleanly") {
    const auto cfg = load_config(std::string(REHAND_CONFIG_DIR) + "/example.yaml");
    const auto log = run_scenario(cfg);
    CHECK(log.records.size() == cfg.handovers);
    CHECK(core_isolated(log));
    CHECK(log.counters.sent == log.counters.delivered + log.counters.dropped);
    CHECK(log.windows.size() == 2);
}
