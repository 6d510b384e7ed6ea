#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ntn/netsim/trace.hpp"
#include "ntn/powerctl/instance_io.hpp"
#include "ntn/scenario/config.hpp"
#include "ntn/scenario/experiment.hpp"
#include "ntn/scenario/report.hpp"

#ifndef NTN_SCENARIO_DIR
#define NTN_SCENARIO_DIR "scenarios"
#endif

namespace {

namespace fs = std::filesystem;
using namespace ntn;
using namespace ntn::scenario;

constexpr const char* kOutDirEnv = "NTNSIM_OUT_DIR";

struct GlobalOptions {
    std::string scenario = std::string(NTN_SCENARIO_DIR) + "/paper-keywest.yaml";
    std::optional<std::uint64_t> seed;
    std::string seeds;
    std::string out;
    bool trace = false;
    std::string format = "both";
    std::string profile;
    unsigned jobs = 1;
};

struct FlowSelect {
    std::string protocol = "tcp";
    std::string direction = "dl";
    std::string flow_id;
};

struct PowerOptions {
    std::string instance;
    std::string mode;
    std::optional<std::uint32_t> levels;
    std::optional<double> tol;
    std::optional<std::uint32_t> max_iter;
};

// Observer that owns the stream it writes to.
class TraceFile : public netsim::Observer {
public:
    TraceFile(const fs::path& path, const netsim::NetGraph& graph) : out_(path), writer_(out_, graph)
    {
        if (!out_) {
            throw std::runtime_error(fmt::format("cannot open trace file '{}'", path.string()));
        }
    }
    void on_event(const netsim::TraceEvent& ev) override { writer_.on_event(ev); }

private:
    std::ofstream out_;
    netsim::CsvTraceWriter writer_;
};

class Session {
public:
    explicit Session(const GlobalOptions& g) : g_(g) {}

    const ScenarioConfig& config()
    {
        if (!config_) {
            config_ = load_scenario(g_.scenario);
            for (const auto& w : config_->warnings) {
                std::cerr << "warning: " << w << '\n';
            }
        }
        return *config_;
    }

    linkbudget::TerminalKind profile()
    {
        if (g_.profile.empty()) {
            return config().active_profile;
        }
        const auto k = linkbudget::parse_terminal_kind(g_.profile);
        if (!k) {
            throw std::runtime_error(fmt::format("unknown profile '{}' (smartphone|vsat)", g_.profile));
        }
        return *k;
    }

    std::vector<std::uint64_t> seeds()
    {
        if (!g_.seeds.empty()) {
            return parse_seed_list(g_.seeds);
        }
        if (g_.seed) {
            return {*g_.seed};
        }
        return config().seeds;
    }

    fs::path out_dir()
    {
        if (!g_.out.empty()) {
            return g_.out;
        }
        if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
            return env;
        }
        return config().output_dir;
    }

    ReportWriter& writer()
    {
        if (!writer_) {
            const auto format = parse_output_format(g_.format);
            if (!format) {
                throw std::runtime_error(fmt::format("unknown format '{}' (csv|json|both)", g_.format));
            }
            writer_.emplace(out_dir(), *format);
        }
        return *writer_;
    }

    ObserverFactory tracer(const std::string& stem)
    {
        if (!g_.trace) {
            return {};
        }
        const auto path = writer().dir() / ("trace_" + stem + ".csv");
        std::cerr << "trace: " << path.string() << '\n';
        return [path](const netsim::NetGraph& graph) { return std::make_unique<TraceFile>(path, graph); };
    }

    std::vector<fs::path> written() const { return writer_ ? writer_->written() : std::vector<fs::path>{}; }
    const GlobalOptions& globals() const noexcept { return g_; }

private:
    const GlobalOptions& g_;
    std::optional<ScenarioConfig> config_;
    std::optional<ReportWriter> writer_;
};

traffic::Protocol parse_protocol(const std::string& s)
{
    if (s == "tcp") {
        return traffic::Protocol::Tcp;
    }
    if (s == "udp") {
        return traffic::Protocol::Udp;
    }
    throw std::runtime_error(fmt::format("unknown protocol '{}' (tcp|udp)", s));
}

traffic::Direction parse_direction(const std::string& s)
{
    if (s == "dl") {
        return traffic::Direction::Downlink;
    }
    if (s == "ul") {
        return traffic::Direction::Uplink;
    }
    throw std::runtime_error(fmt::format("unknown direction '{}' (dl|ul)", s));
}

const FlowConfig& select_flow(const ScenarioConfig& c, const FlowSelect& sel)
{
    if (!sel.flow_id.empty()) {
        if (const auto* f = c.find_flow(sel.flow_id)) {
            return *f;
        }
        throw std::runtime_error(fmt::format("scenario has no flow '{}'", sel.flow_id));
    }
    const auto p = parse_protocol(sel.protocol);
    const auto d = parse_direction(sel.direction);
    if (const auto* f = c.find_flow(p, d)) {
        return *f;
    }
    throw std::runtime_error(fmt::format("scenario has no {} {} flow", sel.protocol, sel.direction));
}

std::string sweep_label(const std::vector<std::uint64_t>& seeds)
{
    return fmt::format("seeds{}", seeds.size());
}

void cmd_ping(Session& s)
{
    const auto& c = s.config();
    const auto profile = s.profile();
    const auto seeds = s.seeds();
    auto& w = s.writer();
    PingSweep sweep;
    if (s.globals().trace || s.globals().jobs <= 1) {
        for (const auto seed : seeds) {
            PingSweepRow row;
            row.seed = seed;
            const ReportContext ctx{c.id, seed, profile};
            row.summary = run_ping(c, seed, profile, s.tracer(ping_stem(ctx))).summary;
            sweep.rows.push_back(std::move(row));
        }
        sweep.aggregate = aggregate_ping(sweep.rows);
    } else {
        sweep = seed_sweep_ping(c, seeds, profile, s.globals().jobs);
    }
    for (const auto& row : sweep.rows) {
        if (!row.summary) {
            std::cerr << fmt::format("seed {}: failed: {}\n", row.seed, row.error);
            continue;
        }
        const ReportContext ctx{c.id, row.seed, profile};
        w.write(ping_stem(ctx), ping_csv(*row.summary), ping_json(ctx, *c.traffic.ping, *row.summary));
    }
    if (seeds.size() > 1) {
        w.write(fmt::format("ping_sweep_{}_{}", linkbudget::to_string(profile), sweep_label(seeds)),
                ping_sweep_csv(sweep), ping_sweep_json(c.id, profile, sweep));
    }
}

void cmd_tput(Session& s, const FlowSelect& sel)
{
    const auto& c = s.config();
    const auto& flow = select_flow(c, sel);
    const auto profile = s.profile();
    const auto seeds = s.seeds();
    auto& w = s.writer();
    FlowSweep sweep;
    if (s.globals().trace || s.globals().jobs <= 1) {
        for (const auto seed : seeds) {
            FlowSweepRow row;
            row.seed = seed;
            const ReportContext ctx{c.id, seed, profile};
            row.report = run_flow(c, flow, seed, profile, s.tracer(flow_stem(ctx, flow)));
            sweep.rows.push_back(std::move(row));
        }
        sweep.aggregate = aggregate_flow(sweep.rows);
    } else {
        sweep = seed_sweep_flow(c, flow, seeds, profile, s.globals().jobs);
    }
    for (const auto& row : sweep.rows) {
        if (!row.report) {
            std::cerr << fmt::format("seed {}: failed: {}\n", row.seed, row.error);
            continue;
        }
        const ReportContext ctx{c.id, row.seed, profile};
        w.write(flow_stem(ctx, flow), flow_csv(flow, *row.report), flow_json(ctx, flow, *row.report));
    }
    if (seeds.size() > 1) {
        w.write(fmt::format("{}_sweep_{}_{}", flow.id, linkbudget::to_string(profile), sweep_label(seeds)),
                flow_sweep_csv(sweep), flow_sweep_json(c.id, profile, flow, sweep));
    }
}

void cmd_compare(Session& s, const FlowSelect& sel)
{
    const auto& c = s.config();
    const auto& flow = select_flow(c, sel);
    std::vector<linkbudget::TerminalKind> profiles;
    for (const auto k : {linkbudget::TerminalKind::Smartphone, linkbudget::TerminalKind::Vsat}) {
        if (c.terminal(k) != nullptr) {
            profiles.push_back(k);
        }
    }
    auto& w = s.writer();
    for (const auto seed : s.seeds()) {
        const auto runs = compare_terminals(c, flow, seed, profiles);
        if (w.wants_csv()) {
            for (const auto& r : runs) {
                w.write_text(flow_stem(ReportContext{c.id, seed, r.kind}, flow) + ".csv", flow_csv(flow, r.report));
            }
        }
        if (w.wants_json()) {
            w.write_json(fmt::format("compare_{}_seed{}.json", flow.id, seed), compare_json(c.id, seed, flow, runs));
        }
    }
}

void cmd_linkbudget(Session& s)
{
    const auto& c = s.config();
    const auto hops = all_link_budgets(c);
    s.writer().write("linkbudget", linkbudget_csv(hops), linkbudget_json(c.id, hops));
}

PowerControlRun power_run(Session& s, const PowerOptions& o, OracleUse use)
{
    PowerControlConfig pc;
    std::optional<powerctl::PowerControlInstance> inst;
    if (!o.instance.empty()) {
        inst = powerctl::load_instance(o.instance);
    } else {
        const auto& c = s.config();
        if (!c.powerctl) {
            throw std::runtime_error("no --instance given and the scenario has no powerctl block");
        }
        pc = *c.powerctl;
        inst = powerctl::load_instance(c.powerctl_instance_path().string());
    }
    if (!o.mode.empty()) {
        pc.mode = powerctl::parse_interference_mode(o.mode);
    }
    if (o.levels) {
        pc.grid_levels = *o.levels;
    }
    if (o.tol) {
        pc.tol = *o.tol;
    }
    if (o.max_iter) {
        pc.max_iter = *o.max_iter;
    }
    return solve_powerctl(std::move(*inst), pc, use);
}

void cmd_powerctl_solve(Session& s, const PowerOptions& o)
{
    const auto run = power_run(s, o, OracleUse::Skip);
    auto& w = s.writer();
    w.write("powerctl_solve", allocation_csv(run.instance, run.solve.allocation), powerctl_solve_json(run, run.mode));
    if (w.wants_csv()) {
        w.write_text("powerctl_solve_trace.csv", objective_trace_csv(run.solve));
    }
}

void cmd_powerctl_oracle(Session& s, const PowerOptions& o)
{
    const auto run = power_run(s, o, OracleUse::Required);
    s.writer().write("powerctl_oracle", allocation_csv(run.instance, run.oracle->allocation),
                     powerctl_oracle_json(run, run.grid_levels, run.mode));
}

void cmd_scenario_run(Session& s)
{
    const auto& c = s.config();
    const auto profile = s.profile();
    auto& w = s.writer();
    const auto hops = all_link_budgets(c);
    w.write("linkbudget", linkbudget_csv(hops), linkbudget_json(c.id, hops));
    std::optional<PowerControlRun> pc;
    if (c.powerctl) {
        pc = run_powerctl(c);
        w.write("powerctl_solve", allocation_csv(pc->instance, pc->solve.allocation), powerctl_solve_json(*pc, pc->mode));
    }
    for (const auto seed : s.seeds()) {
        const auto t0 = std::chrono::steady_clock::now();
        RunReport r;
        r.context = ReportContext{c.id, seed, profile};
        r.link_budgets = hops;
        r.powerctl = pc;
        if (c.traffic.ping) {
            r.ping = run_ping(c, seed, profile, s.tracer(ping_stem(r.context))).summary;
            w.write(ping_stem(r.context), ping_csv(*r.ping), ping_json(r.context, *c.traffic.ping, *r.ping));
        }
        for (const auto& f : c.traffic.flows) {
            auto rep = run_flow(c, f, seed, profile, s.tracer(flow_stem(r.context, f)));
            w.write(flow_stem(r.context, f), flow_csv(f, rep), flow_json(r.context, f, rep));
            r.flows.push_back(FlowRun{f, std::move(rep)});
        }
        r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (w.wants_json()) {
            w.write_json(fmt::format("run_{}_seed{}.json", linkbudget::to_string(profile), seed), run_report_json(r));
        }
        std::cerr << fmt::format("seed {}: wall clock {:.3f} s\n", seed, r.wall_clock_s);
    }
}

void cmd_scenario_validate(Session& s)
{
    const auto& c = s.config();
    std::cout << fmt::format("{}: valid (schema {}, {} nodes, {} links, {} flows)\n", c.id, c.schema_version,
                             c.topology.nodes.size(), c.topology.links.size(), c.traffic.flows.size());
}

void cmd_scenario_dump(Session& s) { std::cout << serialize_scenario(s.config()); }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event NTN link simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--scenario", g.scenario, "Scenario file")->capture_default_str();
    app.add_option("--seed", g.seed, "Run seed (overrides the scenario's seed list)");
    app.add_option("--seeds", g.seeds, "Seed list or ranges, e.g. 1..100,200");
    app.add_option("--out", g.out, fmt::format("Output directory (else ${}, else the scenario's)", kOutDirEnv));
    app.add_flag("--trace", g.trace, "Write an event trace CSV per run");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    app.add_option("--profile", g.profile, "Terminal profile")->check(CLI::IsMember({"smartphone", "vsat"}));
    app.add_option("--jobs", g.jobs, "Worker threads for seed sweeps")->check(CLI::PositiveNumber)
        ->capture_default_str();

    Session session(g);
    std::function<void()> action;
    std::string context;
    auto bind = [&](CLI::App* sub, std::string name, std::function<void()> fn) {
        sub->callback([&action, &context, name = std::move(name), fn = std::move(fn)] {
            context = name;
            action = fn;
        });
    };

    auto* ping = app.add_subcommand("ping", "Ping the scenario's terminal-to-server path");
    bind(ping, "ping", [&] { cmd_ping(session); });

    FlowSelect sel;
    auto add_flow_options = [&sel](CLI::App* sub) {
        sub->add_option("--protocol", sel.protocol)->check(CLI::IsMember({"tcp", "udp"}))->capture_default_str();
        sub->add_option("--direction", sel.direction)->check(CLI::IsMember({"dl", "ul"}))->capture_default_str();
        sub->add_option("--flow", sel.flow_id, "Flow id (overrides protocol/direction)");
    };
    auto* tput = app.add_subcommand("tput", "Throughput test over one scenario flow");
    add_flow_options(tput);
    bind(tput, "tput", [&] { cmd_tput(session, sel); });

    auto* compare = app.add_subcommand("compare", "Run one flow on every terminal profile");
    add_flow_options(compare);
    bind(compare, "compare", [&] { cmd_compare(session, sel); });

    auto* lb = app.add_subcommand("linkbudget", "Derive per-hop link budgets");
    bind(lb, "linkbudget", [&] { cmd_linkbudget(session); });

    PowerOptions po;
    auto* pc = app.add_subcommand("powerctl", "Power-control optimization");
    pc->require_subcommand(1);
    auto add_power_options = [&po](CLI::App* sub) {
        sub->add_option("--instance", po.instance, "Instance JSON (else the scenario's)");
        sub->add_option("--mode", po.mode, "Interference mode")->check(CLI::IsMember({"cross_gain", "verbatim"}));
        sub->add_option("--levels", po.levels, "Brute-force grid levels per triple");
        sub->add_option("--tol", po.tol, "Relative objective tolerance");
        sub->add_option("--max-iter", po.max_iter, "Iteration cap");
    };
    auto* solve = pc->add_subcommand("solve", "Fractional-programming solver");
    add_power_options(solve);
    bind(solve, "powerctl solve", [&] { cmd_powerctl_solve(session, po); });
    auto* oracle = pc->add_subcommand("oracle", "Exhaustive grid search");
    add_power_options(oracle);
    bind(oracle, "powerctl oracle", [&] { cmd_powerctl_oracle(session, po); });

    auto* sc = app.add_subcommand("scenario", "Scenario-level operations");
    sc->require_subcommand(1);
    bind(sc->add_subcommand("run", "Every experiment of the scenario"), "scenario run",
         [&] { cmd_scenario_run(session); });
    bind(sc->add_subcommand("validate", "Load and validate"), "scenario validate",
         [&] { cmd_scenario_validate(session); });
    bind(sc->add_subcommand("dump", "Print the defaulted scenario"), "scenario dump",
         [&] { cmd_scenario_dump(session); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        action();
        if (const auto files = session.written(); !files.empty()) {
            std::cout << console_summary(files);
        }
    } catch (const std::exception& e) {
        std::cerr << fmt::format("ntnsim {}: error: {}\n", context, e.what());
        return 1;
    }
    std::cerr << fmt::format("ntnsim {}: {:.3f} s\n", context,
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return 0;
}
