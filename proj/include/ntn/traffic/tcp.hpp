#pragma once

#include <cstdint>
#include <vector>

#include "ntn/netsim/graph.hpp"
#include "ntn/traffic/report.hpp"

namespace ntn::traffic {

enum class TcpPhase { SlowStart, CongestionAvoidance, Recovery };

struct TcpFlowState {
    double cwnd_bytes = 0.0;
    double ssthresh_bytes = 0.0;
    std::uint32_t mss_bytes = 0;
    double srtt_s = 0.0;
    double in_flight_bytes = 0.0;
    TcpPhase phase = TcpPhase::SlowStart;
};

struct TcpOptions {
    double duration_s = 10.0;
    double report_interval_s = 1.0;
    std::uint32_t mss_bytes = 1448;
    std::uint32_t initial_cwnd_segments = 10;
    double min_rto_s = 0.2;
    double initial_rto_s = 1.0;
    double max_rto_s = 60.0;
    double drain_s = 2.0;
    // Receiver-advertised limit on outstanding data; 0 means unlimited.
    std::uint64_t receive_window_bytes = 1u << 20;
};

/// Congestion-control milestones, in the order they happened.
struct TcpEvent {
    enum class Kind { FastRetransmit, Timeout, RecoveryExit };
    Kind kind = Kind::FastRetransmit;
    double time_s = 0.0;
    double cwnd_before_bytes = 0.0;
    double cwnd_after_bytes = 0.0;
};

struct TcpFlowResult {
    FlowReport report;
    std::vector<TcpEvent> events;
    // Sender state sampled after every ACK; kept only when requested.
    std::vector<TcpFlowState> state_samples;
    TcpFlowState final_state;
};

/// Bulk transfer with a Reno-style sender: slow start from
/// initial_cwnd_segments, one MSS per RTT of additive increase, and on
/// three duplicate ACKs a halving (ssthresh = cwnd/2, cwnd = ssthresh) with
/// NewReno partial-ACK recovery (only the first partial ACK restarts the
/// timer). No SACK. RTO = max(4*srtt, min_rto) with
/// go-back-N on expiry. Outstanding data never exceeds the receive window.
/// The receiver ACKs every segment cumulatively and
/// counts goodput as unique payload on arrival.
TcpFlowResult run_tcp_flow(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                           netsim::NodeIndex dst, const TcpOptions& opts = {},
                           netsim::Observer* observer = nullptr, bool sample_state = false);

}  // namespace ntn::traffic
