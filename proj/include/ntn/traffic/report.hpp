#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntn/netsim/simulator.hpp"

namespace ntn::traffic {

class TrafficError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Protocol { Tcp, Udp };
enum class Direction { Downlink, Uplink };

std::string_view to_string(Protocol p) noexcept;
std::string_view to_string(Direction d) noexcept;

struct IntervalReport {
    double interval_start_s = 0.0;  // relative to flow start
    double interval_end_s = 0.0;
    std::uint64_t bytes = 0;
    double throughput_mbps = 0.0;
    std::uint64_t retransmits_or_losses = 0;
    bool operator==(const IntervalReport&) const = default;
};

/// Buckets receiver-side arrivals into fixed reporting intervals over
/// [start, start + duration). Arrivals outside that window are ignored.
class IntervalAccumulator {
public:
    IntervalAccumulator(double flow_start_s, double duration_s, double interval_s);

    void add_bytes(double at_s, std::uint64_t bytes);
    void add_event(double at_s, std::uint64_t count = 1);

    std::size_t size() const noexcept { return bytes_.size(); }
    std::vector<IntervalReport> finish() const;

private:
    std::optional<std::size_t> bucket(double at_s) const;

    double start_;
    double duration_;
    double interval_;
    std::vector<std::uint64_t> bytes_;
    std::vector<std::uint64_t> events_;
};

struct FlowReport {
    Protocol protocol = Protocol::Udp;
    std::vector<IntervalReport> intervals;
    // Sum of interval bytes: payload received inside the measurement window.
    std::uint64_t total_bytes = 0;
    // All payload received before the run ended, including the drain tail.
    std::uint64_t delivered_bytes = 0;
    std::uint64_t sent_packets = 0;
    std::uint64_t delivered_packets = 0;
    std::uint64_t lost_packets = 0;  // UDP: never delivered
    std::uint64_t retransmits = 0;   // TCP
    std::uint64_t timeouts = 0;      // TCP
    netsim::SimulationStats stats;

    double peak_mbps() const noexcept;
    double min_mbps() const noexcept;
    double mean_mbps() const noexcept;
};

}  // namespace ntn::traffic
