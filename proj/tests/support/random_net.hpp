#pragma once

#include <deque>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ntn/netsim/simulator.hpp"
#include "ntn/netsim/trace.hpp"
#include "ntn/rng.hpp"

namespace ntn::testsupport {

using namespace ntn::netsim;

struct Recorded {
    double time_s;
    TraceEventKind event;
    std::optional<NodeIndex> node;
    std::optional<LinkIndex> link;
    std::uint64_t pkt = 0;
    std::uint32_t size = 0;
    std::uint64_t tag = 0;
};

class Recorder : public Observer {
public:
    void on_event(const TraceEvent& ev) override
    {
        Recorded r{ev.time_s, ev.event, ev.node, ev.link};
        if (ev.packet != nullptr) {
            r.pkt = ev.packet->id;
            r.size = ev.packet->size_bytes;
            r.tag = ev.packet->payload_tag;
        }
        events.push_back(r);
    }
    std::vector<Recorded> events;
};

inline std::string fmt_link(NodeIndex a, NodeIndex b) { return "l" + std::to_string(a) + "-" + std::to_string(b); }

// Connected random graph with bidirectional links and shortest-path routing
// toward every destination. Nodes 0 and 1 always host traffic.
inline NetGraph random_topology(RandomStream& rng)
{
    NetGraph g;
    const auto n = static_cast<std::uint32_t>(2 + rng.next_u64() % 9);
    for (std::uint32_t i = 0; i < n; ++i) {
        const bool relay = i >= 2 && rng.uniform() < 0.4;
        g.add_node("n" + std::to_string(i), relay ? NodeKind::SatelliteRelay : NodeKind::CoreHost);
    }
    auto random_spec = [&rng] {
        LinkSpec s;
        s.propagation_delay_s = rng.uniform(0.0, 0.05);
        s.rate_bps = rng.uniform(1e6, 50e6);
        s.loss_prob = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.2);
        s.queue_capacity_pkts = static_cast<std::uint32_t>(1 + rng.next_u64() % 20);
        switch (rng.next_u64() % 3) {
        case 0:
            s.jitter = JitterSpec::constant(rng.uniform(0.0, 2.0));
            break;
        case 1:
            s.jitter = JitterSpec::uniform(0.0, rng.uniform(0.0, 5.0));
            break;
        default:
            s.jitter = JitterSpec::lognormal(rng.uniform(-1.0, 1.5), rng.uniform(0.1, 1.0));
        }
        return s;
    };
    std::vector<std::vector<NodeIndex>> adj(n);
    auto connect = [&](NodeIndex a, NodeIndex b) {
        if (a == b || g.link_between(a, b)) {
            return;
        }
        g.add_link(fmt_link(a, b), a, b, random_spec());
        g.add_link(fmt_link(b, a), b, a, random_spec());
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (NodeIndex i = 1; i < n; ++i) {
        connect(i, static_cast<NodeIndex>(rng.next_u64() % i));
    }
    for (std::uint32_t extra = 0; extra < n / 2; ++extra) {
        connect(static_cast<NodeIndex>(rng.next_u64() % n), static_cast<NodeIndex>(rng.next_u64() % n));
    }
    for (NodeIndex dst = 0; dst < n; ++dst) {
        std::vector<int> parent(n, -1);
        std::deque<NodeIndex> q{dst};
        parent[dst] = static_cast<int>(dst);
        while (!q.empty()) {
            const auto v = q.front();
            q.pop_front();
            for (const auto w : adj[v]) {
                if (parent[w] < 0) {
                    parent[w] = static_cast<int>(v);
                    g.set_route(w, dst, *g.link_between(w, v));
                    q.push_back(w);
                }
            }
        }
    }
    return g;
}

struct RunOutput {
    SimulationStats stats;
    std::vector<Recorded> events;
    std::string trace;
};

// Random packets between non-relay nodes; before t_end some may still be in
// flight.
inline RunOutput run_random(const NetGraph& graph, std::uint64_t seed, double t_end)
{
    Simulator sim(graph, seed);
    Recorder rec;
    std::ostringstream trace;
    CsvTraceWriter writer(trace, sim.graph());
    sim.add_observer(&rec);
    sim.add_observer(&writer);
    std::vector<NodeIndex> hosts;
    for (NodeIndex i = 0; i < graph.nodes().size(); ++i) {
        if (graph.node(i).kind != NodeKind::SatelliteRelay) {
            hosts.push_back(i);
        }
    }
    RandomStream rng(derive_seed(seed, "traffic"));
    std::vector<FlowId> flows;
    for (int f = 0; f < 3; ++f) {
        flows.push_back(sim.register_flow("f" + std::to_string(f), nullptr));
    }
    for (int i = 0; i < 400; ++i) {
        Packet p;
        p.src = hosts[rng.next_u64() % hosts.size()];
        do {
            p.dst = hosts[rng.next_u64() % hosts.size()];
        } while (p.dst == p.src);
        p.size_bytes = static_cast<std::uint32_t>(kMinPacketBytes + rng.next_u64() % 1480);
        p.flow = flows[rng.next_u64() % flows.size()];
        const double at = rng.uniform(0.0, 1.0);
        sim.schedule(at, [&sim, p] { sim.send(p); });
    }
    RunOutput out;
    out.stats = sim.run_until(t_end);
    out.events = std::move(rec.events);
    out.trace = trace.str();
    return out;
}

}  // namespace ntn::testsupport
