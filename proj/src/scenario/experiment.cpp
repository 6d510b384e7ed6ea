#include "ntn/scenario/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "ntn/powerctl/instance_io.hpp"
#include "ntn/rng.hpp"
#include "ntn/scenario/topology.hpp"

namespace ntn::scenario {

namespace {

// Row i is written only by the worker that claimed index i.
template <class Row, class Fn>
std::vector<Row> run_rows(const std::vector<std::uint64_t>& seeds, unsigned workers, Fn fn)
{
    std::vector<Row> rows(seeds.size());
    auto one = [&](std::size_t i) {
        rows[i].seed = seeds[i];
        try {
            fn(seeds[i], rows[i]);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    };
    if (workers <= 1 || seeds.size() <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            one(i);
        }
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const auto n = std::min<std::size_t>(workers, seeds.size());
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (auto i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
                one(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return rows;
}

template <class Row>
std::vector<const Row*> seed_ordered(const std::vector<Row>& rows)
{
    std::vector<const Row*> out;
    for (const auto& r : rows) {
        out.push_back(&r);
    }
    std::stable_sort(out.begin(), out.end(), [](const Row* a, const Row* b) { return a->seed < b->seed; });
    return out;
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::uint64_t ping_seed(std::uint64_t run_seed) noexcept { return derive_seed(run_seed, "ping"); }

std::uint64_t flow_seed(std::uint64_t run_seed, const std::string& flow_id) noexcept
{
    return derive_seed(run_seed, "flow:" + flow_id);
}

traffic::FlowRequest flow_request(const ScenarioConfig& c, const FlowConfig& f)
{
    traffic::FlowRequest req;
    req.protocol = f.protocol;
    const bool dl = f.direction == traffic::Direction::Downlink;
    req.src = dl ? c.traffic.server : c.traffic.terminal;
    req.dst = dl ? c.traffic.terminal : c.traffic.server;
    req.tcp.duration_s = f.duration_s;
    req.tcp.report_interval_s = f.report_interval_s;
    req.tcp.mss_bytes = c.traffic.tcp.mss_bytes;
    req.tcp.initial_cwnd_segments = c.traffic.tcp.initial_cwnd_segments;
    req.tcp.receive_window_bytes = c.traffic.tcp.receive_window_bytes;
    req.tcp.min_rto_s = c.traffic.tcp.min_rto_s;
    req.udp.target_rate_bps = f.target_rate_bps;
    req.udp.duration_s = f.duration_s;
    req.udp.report_interval_s = f.report_interval_s;
    req.udp.datagram_bytes = f.datagram_bytes;
    return req;
}

traffic::PingResult run_ping(const ScenarioConfig& c, std::uint64_t seed, linkbudget::TerminalKind profile,
                             const ObserverFactory& observe)
{
    if (!c.traffic.ping) {
        throw ScenarioError({"scenario defines no ping session (traffic.ping)"});
    }
    const auto& p = *c.traffic.ping;
    const auto graph = build_topology(c, profile);
    traffic::PingOptions opts;
    opts.count = p.count;
    opts.interval_s = p.interval_s;
    opts.payload_bytes = p.payload_bytes;
    opts.timeout_s = p.timeout_s;
    auto observer = observe ? observe(graph) : nullptr;
    return traffic::run_ping(graph, ping_seed(seed), graph.node_index(p.src), graph.node_index(p.dst), opts,
                             observer.get());
}

traffic::FlowReport run_flow(const ScenarioConfig& c, const FlowConfig& f, std::uint64_t seed,
                             linkbudget::TerminalKind profile, const ObserverFactory& observe)
{
    const auto graph = build_topology(c, profile);
    auto observer = observe ? observe(graph) : nullptr;
    return traffic::run_flow(graph, flow_seed(seed, f.id), flow_request(c, f), observer.get());
}

std::vector<traffic::TerminalRun> compare_terminals(const ScenarioConfig& c, const FlowConfig& f,
                                                    std::uint64_t seed,
                                                    const std::vector<linkbudget::TerminalKind>& profiles)
{
    auto build = [&c](linkbudget::TerminalKind kind) -> std::optional<netsim::NetGraph> {
        if (c.terminal(kind) == nullptr) {
            return std::nullopt;
        }
        return build_topology(c, kind);
    };
    return traffic::compare_terminals(build, profiles, flow_request(c, f), flow_seed(seed, f.id));
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text)
{
    auto number = [text](std::string_view s) {
        std::uint64_t v = 0;
        const auto* end = s.data() + s.size();
        const auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (s.empty() || ec != std::errc() || ptr != end) {
            throw ScenarioError({fmt::format("seed list '{}': '{}' is not an unsigned integer", text, s)});
        }
        return v;
    };
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        if (const auto dots = item.find(".."); dots != std::string_view::npos) {
            const auto lo = number(item.substr(0, dots));
            const auto hi = number(item.substr(dots + 2));
            if (hi < lo) {
                throw ScenarioError({fmt::format("seed list '{}': range '{}' is descending", text, item)});
            }
            for (auto s = lo;; ++s) {
                seeds.push_back(s);
                if (s == hi) {
                    break;
                }
            }
        } else {
            seeds.push_back(number(item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return seeds;
}

PingAggregate aggregate_ping(const std::vector<PingSweepRow>& rows)
{
    PingAggregate a;
    std::vector<double> means;
    std::vector<double> stds;
    for (const auto* r : seed_ordered(rows)) {
        if (!r->summary) {
            ++a.failures;
            continue;
        }
        ++a.runs;
        const auto& s = *r->summary;
        a.probes += s.transmitted;
        a.lost += s.transmitted - s.received;
        if (s.mean_ms) {
            means.push_back(*s.mean_ms);
            stds.push_back(*s.std_ms);
            a.pooled_min_ms = std::min(a.pooled_min_ms.value_or(*s.min_ms), *s.min_ms);
            a.pooled_max_ms = std::max(a.pooled_max_ms.value_or(*s.max_ms), *s.max_ms);
        }
    }
    if (!means.empty()) {
        a.mean_of_means_ms = mean_of(means);
        a.mean_of_std_ms = mean_of(stds);
    }
    return a;
}

PingSweep seed_sweep_ping(const ScenarioConfig& c, const std::vector<std::uint64_t>& seeds,
                          linkbudget::TerminalKind profile, unsigned workers)
{
    if (seeds.empty()) {
        throw ScenarioError({"a seed sweep needs at least one seed"});
    }
    PingSweep sweep;
    sweep.rows = run_rows<PingSweepRow>(seeds, workers, [&](std::uint64_t seed, PingSweepRow& row) {
        row.summary = run_ping(c, seed, profile).summary;
    });
    sweep.aggregate = aggregate_ping(sweep.rows);
    return sweep;
}

FlowAggregate aggregate_flow(const std::vector<FlowSweepRow>& rows)
{
    FlowAggregate a;
    std::vector<double> peaks;
    std::vector<double> means;
    for (const auto* r : seed_ordered(rows)) {
        if (!r->report) {
            ++a.failures;
            continue;
        }
        ++a.runs;
        if (r->report->intervals.empty()) {
            continue;
        }
        peaks.push_back(r->report->peak_mbps());
        means.push_back(r->report->mean_mbps());
        a.pooled_min_mbps = std::min(a.pooled_min_mbps.value_or(r->report->min_mbps()), r->report->min_mbps());
        a.pooled_max_mbps = std::max(a.pooled_max_mbps.value_or(r->report->peak_mbps()), r->report->peak_mbps());
    }
    if (!peaks.empty()) {
        a.mean_peak_mbps = mean_of(peaks);
        a.mean_mbps = mean_of(means);
    }
    return a;
}

FlowSweep seed_sweep_flow(const ScenarioConfig& c, const FlowConfig& f, const std::vector<std::uint64_t>& seeds,
                          linkbudget::TerminalKind profile, unsigned workers)
{
    if (seeds.empty()) {
        throw ScenarioError({"a seed sweep needs at least one seed"});
    }
    FlowSweep sweep;
    sweep.rows = run_rows<FlowSweepRow>(seeds, workers, [&](std::uint64_t seed, FlowSweepRow& row) {
        row.report = run_flow(c, f, seed, profile);
    });
    sweep.aggregate = aggregate_flow(sweep.rows);
    return sweep;
}

PowerControlRun solve_powerctl(powerctl::PowerControlInstance inst, const PowerControlConfig& pc, OracleUse use)
{
    powerctl::FpOptions opts;
    opts.tol = pc.tol;
    opts.max_iter = pc.max_iter;
    opts.mode = pc.mode;
    auto solve = powerctl::fp_solve(inst, std::nullopt, opts);
    std::optional<powerctl::BruteForceResult> oracle;
    const bool fits = inst.triples().size() <= powerctl::kMaxBruteForceTriples;
    if (use == OracleUse::Required || (use == OracleUse::Auto && fits)) {
        oracle = powerctl::brute_force_solve(inst, pc.grid_levels, pc.mode);
    }
    return PowerControlRun{std::move(inst), pc.mode, pc.grid_levels, std::move(solve), std::move(oracle)};
}

PowerControlRun run_powerctl(const ScenarioConfig& c)
{
    if (!c.powerctl) {
        throw ScenarioError({"scenario defines no power-control block (powerctl)"});
    }
    return solve_powerctl(powerctl::load_instance(c.powerctl_instance_path().string()), *c.powerctl);
}

}  // namespace ntn::scenario
