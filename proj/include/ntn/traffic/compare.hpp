#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ntn/linkbudget.hpp"
#include "ntn/netsim/graph.hpp"
#include "ntn/traffic/report.hpp"
#include "ntn/traffic/tcp.hpp"
#include "ntn/traffic/udp.hpp"

namespace ntn::traffic {

/// One measured flow between two named endpoints.
struct FlowRequest {
    Protocol protocol = Protocol::Tcp;
    std::string src;
    std::string dst;
    TcpOptions tcp;
    UdpOptions udp;
};

/// Builds the network as seen by one terminal type; nullopt when the scenario
/// does not define that profile.
using TerminalNetworkBuilder =
    std::function<std::optional<netsim::NetGraph>(linkbudget::TerminalKind)>;

struct TerminalRun {
    linkbudget::TerminalKind kind = linkbudget::TerminalKind::Smartphone;
    FlowReport report;
};

FlowReport run_flow(const netsim::NetGraph& graph, std::uint64_t seed, const FlowRequest& request,
                    netsim::Observer* observer = nullptr);

/// Runs the same flow once per profile, same seed, on each profile's network.
std::vector<TerminalRun> compare_terminals(const TerminalNetworkBuilder& build,
                                           const std::vector<linkbudget::TerminalKind>& profiles,
                                           const FlowRequest& request, std::uint64_t seed);

}  // namespace ntn::traffic
