#include "ntn/traffic/ping.hpp"

#include <algorithm>
#include <cmath>

#include "ntn/traffic/report.hpp"

namespace ntn::traffic {

using netsim::Packet;
using netsim::PacketKind;

PingSummary summarize_ping(std::vector<PingSample> samples)
{
    PingSummary s;
    s.samples = std::move(samples);
    s.transmitted = static_cast<std::uint32_t>(s.samples.size());
    double sum = 0.0;
    for (const auto& p : s.samples) {
        if (!p.rtt_ms) {
            continue;
        }
        ++s.received;
        sum += *p.rtt_ms;
        s.min_ms = s.min_ms ? std::min(*s.min_ms, *p.rtt_ms) : *p.rtt_ms;
        s.max_ms = s.max_ms ? std::max(*s.max_ms, *p.rtt_ms) : *p.rtt_ms;
    }
    if (s.transmitted > 0) {
        s.loss_pct = 100.0 * static_cast<double>(s.transmitted - s.received) / s.transmitted;
    }
    if (s.received == 0) {
        return s;
    }
    const double mean = sum / s.received;
    double ss = 0.0;
    for (const auto& p : s.samples) {
        if (p.rtt_ms) {
            ss += (*p.rtt_ms - mean) * (*p.rtt_ms - mean);
        }
    }
    s.mean_ms = mean;
    s.std_ms = std::sqrt(ss / s.received);
    // Rounding can nudge a constant series' mean past its extremes.
    s.mean_ms = std::clamp(*s.mean_ms, *s.min_ms, *s.max_ms);
    return s;
}

PingResult run_ping(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                    netsim::NodeIndex dst, const PingOptions& opts, netsim::Observer* observer)
{
    if (!graph.reachable(src, dst) || !graph.reachable(dst, src)) {
        throw TrafficError("ping needs routes in both directions between '" + graph.node(src).id + "' and '"
                           + graph.node(dst).id + "'");
    }
    netsim::Simulator sim(graph, seed);
    if (observer != nullptr) {
        sim.add_observer(observer);
    }
    std::vector<PingSample> samples(opts.count);
    for (std::uint32_t i = 0; i < opts.count; ++i) {
        samples[i].seq = i + 1;
    }
    const double deadline = (opts.count > 0 ? (opts.count - 1) * opts.interval_s : 0.0) + opts.timeout_s;
    netsim::FlowId flow = 0;
    flow = sim.register_flow("ping", [&](const Packet& p) {
        if (p.kind == PacketKind::IcmpEcho) {
            Packet reply;
            reply.src = dst;
            reply.dst = src;
            reply.size_bytes = p.size_bytes;
            reply.kind = PacketKind::IcmpReply;
            reply.flow = flow;
            reply.seq = p.seq;
            reply.echo_s = p.created_at_s;
            reply.payload_tag = p.payload_tag;
            sim.send(reply);
        } else if (p.kind == PacketKind::IcmpReply) {
            auto& s = samples.at(p.seq - 1);
            if (!s.rtt_ms && sim.now() <= deadline) {
                s.rtt_ms = (sim.now() - p.echo_s) * 1e3;
            }
        }
    });
    for (std::uint32_t i = 0; i < opts.count; ++i) {
        sim.schedule(i * opts.interval_s, [&, i] {
            Packet echo;
            echo.src = src;
            echo.dst = dst;
            echo.size_bytes = opts.payload_bytes + netsim::kIpUdpHeaderBytes;
            echo.kind = PacketKind::IcmpEcho;
            echo.flow = flow;
            echo.seq = i + 1;
            sim.send(echo);
        });
    }
    PingResult r;
    r.stats = sim.run_until(deadline);
    r.summary = summarize_ping(std::move(samples));
    return r;
}

}  // namespace ntn::traffic
