#pragma once

#include <cstdint>

#include "ntn/netsim/graph.hpp"
#include "ntn/traffic/report.hpp"

namespace ntn::traffic {

struct UdpOptions {
    double target_rate_bps = 0.0;
    double duration_s = 10.0;
    std::uint32_t datagram_bytes = 1448;  // payload; 28 header bytes ride on top
    double report_interval_s = 1.0;
    double drain_s = 2.0;
};

/// Open-loop constant-bit-rate flow. Datagrams leave every
/// datagram_bytes*8/target_rate seconds; intervals report receiver goodput,
/// and losses are charged to the interval the datagram was sent in.
FlowReport run_udp_flow(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                        netsim::NodeIndex dst, const UdpOptions& opts,
                        netsim::Observer* observer = nullptr);

}  // namespace ntn::traffic
