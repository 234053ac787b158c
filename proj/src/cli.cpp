#include "rehand/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rehand/costmodel.hpp"
#include "rehand/crypto.hpp"
#include "rehand/errors.hpp"
#include "rehand/simnet.hpp"

namespace rehand::cli {

namespace fs = std::filesystem;

std::string file_sha256(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ConfigError, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    const auto digest = sha256(ByteView(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
    return to_hex(digest);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["seed"] = seed;
    j["out"] = out;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files) j["files"].push_back({{"name", f.name}, {"sha256", f.sha256}});
    return j.dump(2) + "\n";
}

namespace {

struct InvariantFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        if (text.empty() || text[0] == '-') throw std::invalid_argument("negative");
        v = std::stoull(text, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) throw Error(Errc::ConfigError, source + ": '" + text + "' is not an unsigned 64-bit seed");
    return v;
}

class Output {
public:
    Output(fs::path dir, RunManifest m) : dir_(std::move(dir)), manifest_(std::move(m)) { fs::create_directories(dir_); }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) {
        const fs::path p = dir_ / name;
        {
            std::ofstream f(p, std::ios::binary);
            if (!f) throw Error(Errc::ConfigError, "cannot write " + p.string());
            fn(f);
        }
        manifest_.files.push_back({name, file_sha256(p)});
    }

    void close() {
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        f << manifest_.to_json();
    }

private:
    fs::path dir_;
    RunManifest manifest_;
};

void write_sim_summary(std::ostream& os, const sim::EventLog& log, bool isolated, bool conserved) {
    const auto& c = log.counters;
    std::size_t fast = 0, initial = 0, accepted = 0;
    for (const auto& r : log.records) {
        (r.kind == sim::HandoverKind::Fast ? fast : initial)++;
        if (r.accepted()) ++accepted;
    }
    os << "handovers " << log.records.size() << " initial " << initial << " fast " << fast << " accepted " << accepted
       << '\n';
    if (!log.records.empty()) {
        os << "initial fraction " << std::setprecision(6)
           << static_cast<double>(initial) / static_cast<double>(log.records.size()) << '\n';
    }
    if (!log.records.empty()) {
        for (const auto& [kind, s] : sim::measure_latency(log)) {
            os << "latency " << sim::kind_name(kind) << " n=" << s.count << std::fixed << std::setprecision(3)
               << " mean=" << s.mean << " p50=" << s.p50 << " p95=" << s.p95 << " max=" << s.max << '\n';
            os.unsetf(std::ios::floatfield);
        }
    }
    os << "messages sent " << c.sent << " delivered " << c.delivered << " dropped " << c.dropped << " in-flight "
       << c.in_flight_at_end << '\n';
    os << "faults applied " << c.faults_applied << " unapplied " << c.faults_unapplied << '\n';
    os << "list pushes delivered " << c.pushes_delivered << " installed " << c.pushes_installed << " rejected "
       << c.pushes_rejected << '\n';
    for (const auto& w : log.windows) {
        os << std::fixed << std::setprecision(3) << "revocation ue=" << w.ue << " at_ms=" << w.revoked_at_ms
           << " accumulated=" << (w.accumulated ? 1 : 0) << " last_accept_ms=";
        if (w.last_accept_ms) os << *w.last_accept_ms;
        else os << "none";
        os << '\n';
        os.unsetf(std::ios::floatfield);
    }
    os << "core isolation " << (isolated ? "ok" : "VIOLATED") << '\n';
    os << "conservation " << (conserved ? "ok" : "VIOLATED") << '\n';
}

int cmd_simulate(const std::string& config, const std::optional<std::string>& seed_flag, const fs::path& out_dir,
                 std::ostream& out) {
    sim::ScenarioConfig cfg = sim::load_config(config);
    std::string seed_src = "config";
    if (seed_flag) {
        cfg.seed = parse_seed(*seed_flag, "--seed");
        seed_src = "flag";
    } else if (const char* env = std::getenv("REHAND_SEED")) {
        cfg.seed = parse_seed(env, "REHAND_SEED");
        seed_src = "env";
    }

    const sim::EventLog log = sim::run_scenario(cfg);
    const auto& c = log.counters;
    const bool conserved = c.sent == c.delivered + c.dropped && c.in_flight_at_end == 0;
    const bool isolated = sim::core_isolated(log);

    Output o(out_dir, RunManifest{"simulate", config, std::to_string(cfg.seed), out_dir.string(), {}});
    o.write("eventlog.csv", [&](std::ostream& f) { sim::write_csv(f, log); });
    o.write("summary.txt", [&](std::ostream& f) { write_sim_summary(f, log, isolated, conserved); });
    o.close();

    out << "seed " << cfg.seed << " (" << seed_src << ")\n";
    write_sim_summary(out, log, isolated, conserved);
    if (!conserved) throw InvariantFailure("message conservation violated");
    if (!isolated) throw InvariantFailure("a fast handover reached the core");
    return kExitOk;
}

int cmd_costs(const std::optional<std::string>& config, const std::optional<std::string>& mode, const fs::path& out_dir,
              std::ostream& out) {
    sim::CostSettings settings;
    if (config) settings = sim::load_config(*config).costs;
    if (mode) {
        try {
            settings.grid.base.mode = cost::frame_mode_from_name(*mode);
        } catch (const Error& e) {
            throw Error(Errc::ConfigError, std::string("--mode: ") + e.what());
        }
    }
    const auto result = cost::reduction_sweep(settings.grid.points(), settings.constants, settings.assumptions);

    Output o(out_dir, RunManifest{"costs", config.value_or(""), "", out_dir.string(), {}});
    o.write("costs.csv", [&](std::ostream& f) { cost::write_sweep_csv(f, result); });
    o.write("series.csv", [&](std::ostream& f) { cost::write_series_csv(f, result); });
    o.write("summary.txt", [&](std::ostream& f) { cost::write_summary(f, result); });
    o.close();

    out << "mode " << cost::frame_mode_name(settings.grid.base.mode) << " points " << settings.grid.points().size()
        << '\n';
    cost::write_summary(out, result);
    return kExitOk;
}

int cmd_anonymity(const std::string& log_path, const std::optional<unsigned>& k, const std::optional<std::string>& out_dir,
                  std::ostream& out) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw Error(Errc::ConfigError, "cannot open " + log_path);
    const sim::EventLog log = sim::read_csv(in);
    if (log.records.empty()) throw Error(Errc::EmptyLog, log_path + ": no handover rows");
    if (k && (*k == 0 || *k > 0xFFFF)) throw Error(Errc::ConfigError, "--k must be in [1, 65535]");
    const auto sets = sim::observation_sets(log, k ? std::optional<std::uint16_t>(static_cast<std::uint16_t>(*k)) : std::nullopt);
    if (sets.empty()) throw Error(Errc::EmptyLog, log_path + ": no fast-handover requests to analyse");

    std::ostringstream report;
    for (const auto& [region, obs] : sets) {
        try {
            anon::write_verdict(report, anon::analyse(obs, region));
        } catch (const Error& e) {
            if (e.code() == Errc::ParamError) throw Error(Errc::ConfigError, e.what());
            throw;
        }
    }
    out << report.str();
    if (out_dir) {
        Output o(*out_dir, RunManifest{"anonymity", log_path, "", *out_dir, {}});
        o.write("anonymity.txt", [&](std::ostream& f) { f << report.str(); });
        o.close();
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Region-based handover authentication: simulation, cost model, anonymity analysis", "rehand"};
    app.require_subcommand(1);

    std::string sim_config, sim_out;
    std::optional<std::string> sim_seed;
    std::string sim_format = "csv";
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write the event log");
    simulate->add_option("--config", sim_config, "Scenario YAML")->required();
    simulate->add_option("--seed", sim_seed, "Seed (falls back to REHAND_SEED, then the config)");
    simulate->add_option("--out", sim_out, "Output directory")->required();
    simulate->add_option("--format", sim_format, "Event log format")->check(CLI::IsMember({"csv"}));

    std::optional<std::string> cost_config, cost_mode;
    std::string cost_out, cost_format = "csv";
    auto* costs = app.add_subcommand("costs", "Evaluate the cost model over a (T_RL, v) grid");
    costs->add_option("--config", cost_config, "Scenario YAML (costs section)");
    costs->add_option("--mode", cost_mode, "Frame quantization: linear or ceil");
    costs->add_option("--out", cost_out, "Output directory")->required();
    costs->add_option("--format", cost_format, "Output format")->check(CLI::IsMember({"csv"}));

    std::string anon_log;
    std::optional<unsigned> anon_k;
    std::optional<std::string> anon_out;
    auto* anonymity = app.add_subcommand("anonymity", "Check TID unlinkability on a simulator event log");
    anonymity->add_option("--log", anon_log, "Event log CSV")->required();
    anonymity->add_option("--k", anon_k, "Blind factors per region (default: largest index seen)");
    anonymity->add_option("--out", anon_out, "Output directory for the report");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    if (!argv.empty()) argv.pop_back();  // program name
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*simulate) return cmd_simulate(sim_config, sim_seed, sim_out, out);
        if (*costs) return cmd_costs(cost_config, cost_mode, cost_out, out);
        if (*anonymity) return cmd_anonymity(anon_log, anon_k, anon_out, out);
    } catch (const InvariantFailure& e) {
        err << "invariant violated: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        switch (e.code()) {
            case Errc::ConfigError:
            case Errc::EmptyLog:
            case Errc::ParamError:
                return kExitInput;
            default:
                return kExitInvariant;
        }
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitInput;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace rehand::cli
