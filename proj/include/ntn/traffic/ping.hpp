#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ntn/netsim/graph.hpp"
#include "ntn/netsim/simulator.hpp"

namespace ntn::traffic {

struct PingSample {
    std::uint32_t seq = 0;
    std::optional<double> rtt_ms;  // empty when the probe was lost
    bool operator==(const PingSample&) const = default;
};

/// Statistics over received probes only. min/max/mean/std are absent when
/// every probe was lost. std is the population deviation (ping's mdev).
struct PingSummary {
    std::vector<PingSample> samples;
    std::optional<double> min_ms;
    std::optional<double> max_ms;
    std::optional<double> mean_ms;
    std::optional<double> std_ms;
    double loss_pct = 0.0;
    std::uint32_t transmitted = 0;
    std::uint32_t received = 0;
};

PingSummary summarize_ping(std::vector<PingSample> samples);

struct PingOptions {
    std::uint32_t count = 10;
    double interval_s = 1.0;
    std::uint32_t payload_bytes = 64;
    double timeout_s = 5.0;  // replies later than this after the last probe are lost
};

struct PingResult {
    PingSummary summary;
    netsim::SimulationStats stats;
};

PingResult run_ping(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                    netsim::NodeIndex dst, const PingOptions& opts = {},
                    netsim::Observer* observer = nullptr);

}  // namespace ntn::traffic
