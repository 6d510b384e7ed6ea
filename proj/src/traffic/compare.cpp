#include "ntn/traffic/compare.hpp"

namespace ntn::traffic {

FlowReport run_flow(const netsim::NetGraph& graph, std::uint64_t seed, const FlowRequest& request,
                    netsim::Observer* observer)
{
    const auto src = graph.node_index(request.src);
    const auto dst = graph.node_index(request.dst);
    if (request.protocol == Protocol::Tcp) {
        return run_tcp_flow(graph, seed, src, dst, request.tcp, observer).report;
    }
    return run_udp_flow(graph, seed, src, dst, request.udp, observer);
}

std::vector<TerminalRun> compare_terminals(const TerminalNetworkBuilder& build,
                                           const std::vector<linkbudget::TerminalKind>& profiles,
                                           const FlowRequest& request, std::uint64_t seed)
{
    std::vector<TerminalRun> runs;
    for (auto kind : profiles) {
        auto graph = build(kind);
        if (!graph) {
            throw TrafficError("terminal profile '" + std::string(linkbudget::to_string(kind))
                               + "' is not defined");
        }
        runs.push_back(TerminalRun{kind, run_flow(*graph, seed, request)});
    }
    return runs;
}

}  // namespace ntn::traffic
