#pragma once

#include <string>
#include <vector>

#include "ntn/linkbudget.hpp"
#include "ntn/netsim/graph.hpp"
#include "ntn/scenario/config.hpp"

namespace ntn::scenario {

/// Budget inputs and outputs for one direction of the service link.
struct HopBudget {
    std::string name;  // "downlink" or "uplink/<profile>"
    double distance_m = 0.0;
    linkbudget::LinkBudgetParams params;
    linkbudget::LinkBudgetResult result;
    double share_factor = 1.0;
    double effective_rate_bps = 0.0;
    // Set when the scenario pins the rate instead of deriving it.
    std::optional<double> rate_override_bps;

    double link_rate_bps() const noexcept { return rate_override_bps.value_or(effective_rate_bps); }
};

double service_link_distance_m(const ScenarioConfig& config);
HopBudget downlink_budget(const ScenarioConfig& config);
/// Throws ScenarioError when the profile is not defined.
HopBudget uplink_budget(const ScenarioConfig& config, linkbudget::TerminalKind profile);

/// The network as seen by one terminal type. Satellite-hop delays follow the
/// geometry; budget-rated links take their rate from the hop budgets, and
/// uplink-rated links also take the terminal's loss, jitter and queue.
/// Throws netsim::TopologyError when a traffic endpoint pair is unroutable in
/// either direction or when a flow would start and end at the same node.
netsim::NetGraph build_topology(const ScenarioConfig& config, linkbudget::TerminalKind profile);

}  // namespace ntn::scenario
