#include "ntn/traffic/udp.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ntn::traffic {

using netsim::Packet;
using netsim::PacketKind;

FlowReport run_udp_flow(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                        netsim::NodeIndex dst, const UdpOptions& opts, netsim::Observer* observer)
{
    if (!(opts.target_rate_bps > 0.0)) {
        throw TrafficError("UDP target rate must be positive");
    }
    if (opts.datagram_bytes == 0) {
        throw TrafficError("UDP datagram size must be positive");
    }
    if (!graph.reachable(src, dst)) {
        throw TrafficError("no route from '" + graph.node(src).id + "' to '" + graph.node(dst).id + "'");
    }
    netsim::Simulator sim(graph, seed);
    if (observer != nullptr) {
        sim.add_observer(observer);
    }

    const double spacing = opts.datagram_bytes * 8.0 / opts.target_rate_bps;
    IntervalAccumulator goodput(0.0, opts.duration_s, opts.report_interval_s);
    IntervalAccumulator losses(0.0, opts.duration_s, opts.report_interval_s);
    std::vector<double> send_time;
    std::vector<bool> received;
    FlowReport report;
    report.protocol = Protocol::Udp;

    const auto flow = sim.register_flow("udp", [&](const Packet& p) {
        if (p.seq < received.size() && !received[p.seq]) {
            received[p.seq] = true;
            ++report.delivered_packets;
            report.delivered_bytes += opts.datagram_bytes;
            goodput.add_bytes(sim.now(), opts.datagram_bytes);
        }
    });

    std::function<void(std::uint64_t)> emit = [&](std::uint64_t k) {
        Packet d;
        d.src = src;
        d.dst = dst;
        d.size_bytes = opts.datagram_bytes + netsim::kIpUdpHeaderBytes;
        d.kind = PacketKind::UdpData;
        d.flow = flow;
        d.seq = k;
        send_time.push_back(sim.now());
        received.push_back(false);
        sim.send(d);
        const double next = static_cast<double>(k + 1) * spacing;
        if (next < opts.duration_s) {
            sim.schedule(next, [&emit, k] { emit(k + 1); });
        }
    };
    if (opts.duration_s > 0.0) {
        sim.schedule(0.0, [&emit] { emit(0); });
    }
    report.stats = sim.run_until(opts.duration_s + opts.drain_s);

    report.sent_packets = send_time.size();
    for (std::size_t k = 0; k < send_time.size(); ++k) {
        if (!received[k]) {
            ++report.lost_packets;
            losses.add_event(send_time[k]);
        }
    }
    report.intervals = goodput.finish();
    const auto loss_rows = losses.finish();
    for (std::size_t i = 0; i < report.intervals.size(); ++i) {
        report.intervals[i].retransmits_or_losses = loss_rows[i].retransmits_or_losses;
        report.total_bytes += report.intervals[i].bytes;
    }
    return report;
}

}  // namespace ntn::traffic
