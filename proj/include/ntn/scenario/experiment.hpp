#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ntn/powerctl/instance.hpp"
#include "ntn/powerctl/solver.hpp"
#include "ntn/scenario/config.hpp"
#include "ntn/traffic/compare.hpp"
#include "ntn/traffic/ping.hpp"

namespace ntn::scenario {

/// Run-level seeds. Every experiment of one run derives its simulator seed
/// from the run seed and a fixed label, so adding a flow leaves the others'
/// draws untouched.
std::uint64_t ping_seed(std::uint64_t run_seed) noexcept;
std::uint64_t flow_seed(std::uint64_t run_seed, const std::string& flow_id) noexcept;

/// Creates a per-run observer once the run's network exists; the observer is
/// destroyed before the network.
using ObserverFactory = std::function<std::unique_ptr<netsim::Observer>(const netsim::NetGraph&)>;

traffic::FlowRequest flow_request(const ScenarioConfig& config, const FlowConfig& flow);

traffic::PingResult run_ping(const ScenarioConfig& config, std::uint64_t seed, linkbudget::TerminalKind profile,
                             const ObserverFactory& observe = {});

traffic::FlowReport run_flow(const ScenarioConfig& config, const FlowConfig& flow, std::uint64_t seed,
                             linkbudget::TerminalKind profile, const ObserverFactory& observe = {});

/// Same flow and seed on each profile's network.
std::vector<traffic::TerminalRun> compare_terminals(const ScenarioConfig& config, const FlowConfig& flow,
                                                    std::uint64_t seed,
                                                    const std::vector<linkbudget::TerminalKind>& profiles);

struct PingSweepRow {
    std::uint64_t seed = 0;
    std::optional<traffic::PingSummary> summary;  // empty when the run failed
    std::string error;
};

/// Reduction over the successful rows. Values are reduced in seed order, so
/// permuting the input leaves every field bit-identical.
struct PingAggregate {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::size_t probes = 0;
    std::size_t lost = 0;
    std::optional<double> mean_of_means_ms;
    std::optional<double> mean_of_std_ms;
    std::optional<double> pooled_min_ms;
    std::optional<double> pooled_max_ms;
};

struct PingSweep {
    std::vector<PingSweepRow> rows;  // input seed order, duplicates kept
    PingAggregate aggregate;
};

/// Seed lists: comma-separated values and inclusive ranges, e.g. "1..100,200".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

PingAggregate aggregate_ping(const std::vector<PingSweepRow>& rows);

/// Runs are independent; with workers > 1 they are spread over threads.
PingSweep seed_sweep_ping(const ScenarioConfig& config, const std::vector<std::uint64_t>& seeds,
                          linkbudget::TerminalKind profile, unsigned workers = 1);

struct FlowSweepRow {
    std::uint64_t seed = 0;
    std::optional<traffic::FlowReport> report;
    std::string error;
};

struct FlowAggregate {
    std::size_t runs = 0;
    std::size_t failures = 0;
    std::optional<double> mean_peak_mbps;
    std::optional<double> mean_mbps;
    std::optional<double> pooled_min_mbps;
    std::optional<double> pooled_max_mbps;
};

struct FlowSweep {
    std::vector<FlowSweepRow> rows;
    FlowAggregate aggregate;
};

FlowAggregate aggregate_flow(const std::vector<FlowSweepRow>& rows);

FlowSweep seed_sweep_flow(const ScenarioConfig& config, const FlowConfig& flow,
                          const std::vector<std::uint64_t>& seeds, linkbudget::TerminalKind profile,
                          unsigned workers = 1);

struct PowerControlRun {
    powerctl::PowerControlInstance instance;
    powerctl::InterferenceMode mode = powerctl::InterferenceMode::CrossGain;
    std::size_t grid_levels = 32;
    powerctl::SolveReport solve;
    // Present when the instance is small enough for exhaustive search.
    std::optional<powerctl::BruteForceResult> oracle;
};

/// Runs fp_solve and, when `oracle` is Auto, brute force only on instances
/// within its size guard. Required propagates InstanceTooLarge.
enum class OracleUse { Skip, Auto, Required };
PowerControlRun solve_powerctl(powerctl::PowerControlInstance instance, const PowerControlConfig& options,
                               OracleUse oracle = OracleUse::Auto);

PowerControlRun run_powerctl(const ScenarioConfig& config);

}  // namespace ntn::scenario
