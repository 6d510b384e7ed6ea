#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "ntn/geometry.hpp"
#include "ntn/linkbudget.hpp"
#include "ntn/powerctl/instance.hpp"
#include "ntn/powerctl/objective.hpp"
#include "ntn/powerctl/solver.hpp"
#include "ntn/scenario/config.hpp"
#include "ntn/scenario/experiment.hpp"
#include "ntn/traffic/ping.hpp"
#include "ntn/traffic/udp.hpp"
#include "random_net.hpp"

using namespace ntn;
using linkbudget::TerminalKind;

namespace {

// Tolerances and envelopes, fixed here rather than taken from the code under test.
constexpr double kFsplTolDb = 0.01;
constexpr double kSlantTolKm = 0.5;
constexpr double kDelayTolMs = 0.001;
constexpr double kEirpMutationDb = 0.1;
constexpr std::size_t kPingSeeds = 1000;
constexpr double kRttMeanTarget = 145.4;
constexpr double kRttMeanTol = 5.0;
constexpr double kRttStdTarget = 18.0;
constexpr double kRttStdTol = 6.0;
constexpr double kRttLo = 120.0;
constexpr double kRttHi = 210.0;
constexpr double kRttInsideShare = 0.99;
constexpr std::size_t kFlowSeeds = 100;
constexpr double kPdlCap = 55.0;
constexpr double kPdlPeakFloor = 40.0;
constexpr double kPdlPeakShare = 0.90;
constexpr double kPdlDip = 15.0;
constexpr double kVsatUdpLo = 38.0;
constexpr double kVsatUdpHi = 45.0;
constexpr double kVsatUdpShare = 0.90;
constexpr double kOrderingShare = 0.95;
constexpr std::uint64_t kTopologies = 60;
constexpr std::size_t kPcInstances = 50;
constexpr std::size_t kPcGrid = 32;
constexpr double kPcRatio = 0.95;
constexpr double kTraceTol = 1e-9;
constexpr double kStatTol = 0.01;

struct Outcome {
    bool pass = false;
    std::string detail;
};

const char* kBundled = NTN_SCENARIO_DIR "/paper-keywest.yaml";

unsigned workers() { return std::max(1U, std::thread::hardware_concurrency()); }

std::vector<std::uint64_t> seeds(std::size_t n) { return scenario::parse_seed_list(fmt::format("1..{}", n)); }

Outcome path_loss()
{
    // Friis: 20 log10(4 pi d f / c).
    auto friis = [](double f_hz, double d_m) {
        return 20.0 * std::log10(4.0 * std::numbers::pi * d_m * f_hz / geometry::kSpeedOfLight);
    };
    const double a = linkbudget::fspl_db(12.7, 582'200.0);
    const double b = linkbudget::fspl_db(14.5, 582'200.0);
    const bool ok = std::abs(a - 169.83) <= kFsplTolDb && std::abs(b - 170.98) <= kFsplTolDb
                    && std::abs(a - friis(12.7e9, 582'200.0)) <= kFsplTolDb
                    && std::abs(b - friis(14.5e9, 582'200.0)) <= kFsplTolDb;
    return {ok, fmt::format("fspl 12.7 GHz {:.4f} dB, 14.5 GHz {:.4f} dB", a, b)};
}

Outcome slant_geometry()
{
    const double re = 6'371'000.0;
    const double h = 550'000.0;
    const double e = 70.0 * std::numbers::pi / 180.0;
    // Law of cosines in the Earth-centre triangle.
    const double hand = std::sqrt((re + h) * (re + h) - re * re * std::cos(e) * std::cos(e)) - re * std::sin(e);
    const double r = geometry::slant_range({70.0, h, re});
    const double delay_ms = geometry::propagation_delay(r) * 1e3;
    const bool ok = std::abs(r / 1e3 - 582.2) <= kSlantTolKm && std::abs(hand / 1e3 - 582.2) <= kSlantTolKm
                    && std::abs(delay_ms - 1.942) <= kDelayTolMs
                    && std::abs(hand / 299'792.458 - 1.942) <= kDelayTolMs;
    return {ok, fmt::format("slant {:.3f} km (hand {:.3f}), delay {:.4f} ms", r / 1e3, hand / 1e3, delay_ms)};
}

std::string scenario_errors(const std::string& text)
{
    try {
        const auto c = scenario::parse_scenario(text, NTN_SCENARIO_DIR);
        std::string all;
        for (const auto& e : scenario::validate(c)) {
            all += e + "; ";
        }
        return all;
    } catch (const std::exception& e) {
        return e.what();
    }
}

Outcome eirp_consistency()
{
    std::ifstream in(kBundled);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto c = scenario::load_scenario(kBundled);
    bool ok = scenario_errors(text).empty() && c.link_budget.eirp_dbm && *c.link_budget.eirp_dbm == 80.9
              && c.link_budget.eirp_dbw == 50.9;
    int rejected = 0;
    int mutated = 0;
    for (const auto& [key, base] : std::vector<std::pair<std::string, double>>{{"eirp_dbw", 50.9}, {"eirp_dbm", 80.9}}) {
        for (const double d : {-kEirpMutationDb, kEirpMutationDb, -1.0, 1.0}) {
            const std::regex line("(\\n\\s*" + key + ":)[^\\n]*");
            const auto changed = std::regex_replace(text, line, fmt::format("$1 {:.1f}", base + d),
                                                    std::regex_constants::format_first_only);
            ++mutated;
            if (changed != text && !scenario_errors(changed).empty()) {
                ++rejected;
            }
        }
    }
    ok = ok && rejected == mutated;
    return {ok, fmt::format("bundled scenario valid, {}/{} EIRP mutations rejected", rejected, mutated)};
}

Outcome rtt_envelope()
{
    const auto c = scenario::load_scenario(kBundled);
    const auto sweep = scenario::seed_sweep_ping(c, seeds(kPingSeeds), TerminalKind::Smartphone, workers());
    std::size_t probes = 0;
    std::size_t inside = 0;
    for (const auto& row : sweep.rows) {
        if (!row.summary) {
            continue;
        }
        for (const auto& s : row.summary->samples) {
            ++probes;
            if (s.rtt_ms && *s.rtt_ms >= kRttLo && *s.rtt_ms <= kRttHi) {
                ++inside;
            }
        }
    }
    const auto& a = sweep.aggregate;
    const double mean = a.mean_of_means_ms.value_or(NAN);
    const double sd = a.mean_of_std_ms.value_or(NAN);
    const double share = probes > 0 ? static_cast<double>(inside) / static_cast<double>(probes) : 0.0;
    const bool ok = a.failures == 0 && std::abs(mean - kRttMeanTarget) <= kRttMeanTol
                    && std::abs(sd - kRttStdTarget) <= kRttStdTol && share >= kRttInsideShare;
    return {ok, fmt::format("mean {:.2f} ms, std {:.2f} ms, {:.2f}% of {} probes in [{}, {}] ms", mean, sd,
                            100.0 * share, probes, kRttLo, kRttHi)};
}

scenario::FlowSweep flow_sweep(const scenario::ScenarioConfig& c, const std::string& id, TerminalKind profile)
{
    return scenario::seed_sweep_flow(c, *c.find_flow(id), seeds(kFlowSeeds), profile, workers());
}

Outcome pdl_envelope()
{
    const auto c = scenario::load_scenario(kBundled);
    const auto sweep = flow_sweep(c, "tcp-dl", TerminalKind::Smartphone);
    double highest = 0.0;
    double lowest = INFINITY;
    std::size_t peaked = 0;
    std::size_t runs = 0;
    for (const auto& row : sweep.rows) {
        if (!row.report) {
            continue;
        }
        ++runs;
        highest = std::max(highest, row.report->peak_mbps());
        lowest = std::min(lowest, row.report->min_mbps());
        peaked += row.report->peak_mbps() > kPdlPeakFloor ? 1 : 0;
    }
    const bool ok = runs == kFlowSeeds && highest <= kPdlCap
                    && static_cast<double>(peaked) >= kPdlPeakShare * static_cast<double>(runs) && lowest < kPdlDip;
    return {ok, fmt::format("max interval {:.2f} Mbps, peak > {} in {}/{} runs, lowest interval {:.2f} Mbps",
                            highest, kPdlPeakFloor, peaked, runs, lowest)};
}

Outcome udp_behaviour()
{
    netsim::LinkSpec spec;
    spec.rate_bps = 100e6;
    spec.propagation_delay_s = 0.01;
    netsim::NetGraph g;
    const auto a = g.add_node("a", netsim::NodeKind::CoreHost);
    const auto b = g.add_node("b", netsim::NodeKind::UserTerminal);
    g.add_link("a-b", a, b, spec);
    g.add_route_path({a, b});
    traffic::UdpOptions o;
    o.target_rate_bps = 30e6;
    o.duration_s = 10.0;
    const auto cbr = traffic::run_udp_flow(g, 1, a, b, o);
    // 30e6 * 10 / 8, exactly representable.
    const double expected = 37'500'000.0;
    const double miss = std::abs(static_cast<double>(cbr.delivered_bytes) - expected);

    const auto c = scenario::load_scenario(kBundled);
    const auto sweep = flow_sweep(c, "udp-ul", TerminalKind::Vsat);
    std::size_t within = 0;
    std::size_t runs = 0;
    for (const auto& row : sweep.rows) {
        if (!row.report) {
            continue;
        }
        ++runs;
        within += row.report->min_mbps() >= kVsatUdpLo && row.report->peak_mbps() <= kVsatUdpHi ? 1 : 0;
    }
    const bool ok = miss <= o.datagram_bytes && runs == kFlowSeeds
                    && static_cast<double>(within) >= kVsatUdpShare * static_cast<double>(runs);
    return {ok, fmt::format("CBR delivered {} of {:.0f} bytes, VSAT UDP UL in [{}, {}] Mbps in {}/{} runs",
                            cbr.delivered_bytes, expected, kVsatUdpLo, kVsatUdpHi, within, runs)};
}

Outcome terminal_ordering()
{
    const auto c = scenario::load_scenario(kBundled);
    const auto tcp_phone = flow_sweep(c, "tcp-ul", TerminalKind::Smartphone);
    const auto tcp_vsat = flow_sweep(c, "tcp-ul", TerminalKind::Vsat);
    const auto udp_phone = flow_sweep(c, "udp-ul", TerminalKind::Smartphone);
    const auto udp_vsat = flow_sweep(c, "udp-ul", TerminalKind::Vsat);
    std::size_t tcp_ok = 0;
    std::size_t udp_ok = 0;
    std::size_t runs = 0;
    for (std::size_t i = 0; i < kFlowSeeds; ++i) {
        const auto& tp = tcp_phone.rows[i].report;
        const auto& tv = tcp_vsat.rows[i].report;
        const auto& up = udp_phone.rows[i].report;
        const auto& uv = udp_vsat.rows[i].report;
        if (!tp || !tv || !up || !uv) {
            continue;
        }
        ++runs;
        tcp_ok += tp->peak_mbps() > tv->peak_mbps() ? 1 : 0;
        udp_ok += uv->min_mbps() >= up->min_mbps() ? 1 : 0;
    }
    const double need = kOrderingShare * static_cast<double>(kFlowSeeds);
    const bool ok = runs == kFlowSeeds && static_cast<double>(tcp_ok) >= need && static_cast<double>(udp_ok) >= need;
    return {ok, fmt::format("TCP peak smartphone > VSAT in {}/{}, UDP min VSAT >= smartphone in {}/{}", tcp_ok,
                            runs, udp_ok, runs)};
}

Outcome simulator_invariants()
{
    using namespace testsupport;
    std::size_t violations = 0;
    std::size_t runs = 0;
    for (std::uint64_t trial = 0; trial < kTopologies; ++trial) {
        RandomStream topo_rng(derive_seed(trial, "acceptance-topology"));
        const auto graph = random_topology(topo_rng);
        violations += graph.nodes().size() > 10 ? 1 : 0;
        for (const double t_end : {0.3, 30.0}) {
            ++runs;
            const auto out = run_random(graph, trial, t_end);
            for (const auto& f : out.stats.flows) {
                violations += f.injected
                                      != f.delivered + f.dropped_loss + f.dropped_queue + f.dropped_no_route
                                             + f.in_flight_at_end
                                  ? 1
                                  : 0;
            }
            double prev = 0.0;
            std::map<std::uint64_t, std::pair<std::uint32_t, std::uint64_t>> identity;
            std::map<netsim::LinkIndex, std::vector<std::uint64_t>> accepted;
            std::map<netsim::LinkIndex, std::vector<std::uint64_t>> arrived;
            for (const auto& e : out.events) {
                violations += e.time_s < prev ? 1 : 0;
                prev = e.time_s;
                if (e.pkt == 0) {
                    continue;
                }
                const auto [it, fresh] = identity.try_emplace(e.pkt, e.size, e.tag);
                violations += !fresh && it->second != std::make_pair(e.size, e.tag) ? 1 : 0;
                if (e.event == netsim::TraceEventKind::Enqueue) {
                    accepted[*e.link].push_back(e.pkt);
                } else if (e.event == netsim::TraceEventKind::Arrive) {
                    arrived[*e.link].push_back(e.pkt);
                }
            }
            for (const auto& [link, seq] : arrived) {
                const auto& in = accepted[link];
                std::size_t k = 0;
                for (const auto id : seq) {
                    while (k < in.size() && in[k] != id) {
                        ++k;
                    }
                    violations += k < in.size() ? 0 : 1;
                    ++k;
                }
            }
            const auto again = run_random(graph, trial, t_end);
            violations += again.stats == out.stats && again.trace == out.trace ? 0 : 1;
        }
    }
    return {violations == 0, fmt::format("{} runs over {} topologies, {} violations", runs, kTopologies, violations)};
}

Outcome oracle_equivalence()
{
    std::size_t below = 0;
    std::size_t non_monotone = 0;
    double worst = INFINITY;
    RandomStream dims(derive_seed(9, "acceptance-powerctl"));
    for (std::size_t i = 0; i < kPcInstances; ++i) {
        const auto stations = static_cast<std::size_t>(1 + dims.next_u64() % 3);
        const auto users = static_cast<std::size_t>(1 + dims.next_u64() % 4);
        const auto inst = powerctl::random_instance(users, stations, 1, derive_seed(i, "instance"));
        const auto fp = powerctl::fp_solve(inst);
        const auto bf = powerctl::brute_force_solve(inst, kPcGrid);
        const double fp_obj = powerctl::sum_objective(inst, fp.allocation);
        if (bf.objective > 0.0) {
            worst = std::min(worst, fp_obj / bf.objective);
        }
        below += fp_obj >= kPcRatio * bf.objective ? 0 : 1;
        for (std::size_t k = 1; k < fp.objective_trace.size(); ++k) {
            non_monotone += fp.objective_trace[k] + kTraceTol >= fp.objective_trace[k - 1] ? 0 : 1;
        }
    }
    return {below == 0 && non_monotone == 0,
            fmt::format("{} instances, worst FP/oracle {:.4f}, {} below {}, {} trace decreases", kPcInstances, worst,
                        below, kPcRatio, non_monotone)};
}

Outcome ping_statistics()
{
    const auto s = traffic::summarize_ping({{1, 100.0}, {2, 120.0}, {3, 140.0}});
    const bool ok = s.mean_ms && std::abs(*s.mean_ms - 120.0) <= kStatTol && std::abs(*s.std_ms - 16.33) <= kStatTol
                    && *s.min_ms == 100.0 && *s.max_ms == 140.0;
    return {ok, fmt::format("mean {:.2f}, std {:.4f}, min {:.0f}, max {:.0f}", s.mean_ms.value_or(NAN),
                            s.std_ms.value_or(NAN), s.min_ms.value_or(NAN), s.max_ms.value_or(NAN))};
}

}  // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"path loss", path_loss},
        {"slant geometry", slant_geometry},
        {"EIRP consistency", eirp_consistency},
        {"RTT envelope", rtt_envelope},
        {"TCP downlink envelope", pdl_envelope},
        {"UDP behaviour", udp_behaviour},
        {"terminal ordering", terminal_ordering},
        {"simulator invariants", simulator_invariants},
        {"power-control oracle", oracle_equivalence},
        {"ping statistics", ping_statistics},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("threw: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        fmt::print("{} criterion {} ({}): {} [{:.1f} s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                   o.detail, secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
