#include "ntn/netsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace ntn::netsim {

std::string_view to_string(PacketKind kind) noexcept
{
    switch (kind) {
    case PacketKind::IcmpEcho:
        return "icmp_echo";
    case PacketKind::IcmpReply:
        return "icmp_reply";
    case PacketKind::TcpData:
        return "tcp_data";
    case PacketKind::TcpAck:
        return "tcp_ack";
    case PacketKind::UdpData:
        return "udp_data";
    }
    return "unknown";
}

std::string_view to_string(DropReason reason) noexcept
{
    switch (reason) {
    case DropReason::Loss:
        return "loss";
    case DropReason::Queue:
        return "queue";
    case DropReason::NoRoute:
        return "no_route";
    }
    return "unknown";
}

std::string_view to_string(TraceEventKind kind) noexcept
{
    switch (kind) {
    case TraceEventKind::Inject:
        return "inject";
    case TraceEventKind::Enqueue:
        return "enqueue";
    case TraceEventKind::TxStart:
        return "tx_start";
    case TraceEventKind::TxEnd:
        return "tx_end";
    case TraceEventKind::Arrive:
        return "arrive";
    case TraceEventKind::Deliver:
        return "deliver";
    case TraceEventKind::Drop:
        return "drop";
    case TraceEventKind::Timer:
        return "timer";
    }
    return "unknown";
}

std::string SimulationStats::to_text(const NetGraph& graph) const
{
    std::string out = fmt::format("end_time_s={:.9f} events={}\n", end_time_s, events_processed);
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& c = links[i];
        out += fmt::format("link {} enq={} tx={} dlv={} loss={} qdrop={} bytes={}\n", graph.link(i).id,
                           c.enqueued, c.transmitted, c.delivered, c.dropped_loss, c.dropped_queue,
                           c.bytes_delivered);
    }
    for (const auto& f : flows) {
        out += fmt::format("flow {} inj={} dlv={} loss={} qdrop={} noroute={} inflight={} bytes_in={} "
                           "bytes_out={}\n",
                           f.label, f.injected, f.delivered, f.dropped_loss, f.dropped_queue,
                           f.dropped_no_route, f.in_flight_at_end, f.bytes_injected, f.bytes_delivered);
    }
    return out;
}

Simulator::Simulator(NetGraph graph, std::uint64_t seed)
    : graph_(std::move(graph)), seed_(seed)
{
    link_state_.resize(graph_.links().size());
    link_counters_.resize(graph_.links().size());
    for (std::size_t i = 0; i < link_state_.size(); ++i) {
        link_state_[i].rng = RandomStream(derive_seed(seed_, graph_.link(i).id));
    }
}

FlowId Simulator::register_flow(std::string label, DeliveryHandler on_deliver)
{
    flow_counters_.push_back(FlowCounters{std::move(label)});
    handlers_.push_back(std::move(on_deliver));
    return static_cast<FlowId>(handlers_.size() - 1);
}

std::uint32_t Simulator::alloc_packet(const Packet& p)
{
    if (!free_packets_.empty()) {
        const auto slot = free_packets_.back();
        free_packets_.pop_back();
        packets_[slot] = p;
        packet_live_[slot] = true;
        return slot;
    }
    packets_.push_back(p);
    packet_live_.push_back(true);
    return static_cast<std::uint32_t>(packets_.size() - 1);
}

void Simulator::free_packet(std::uint32_t slot)
{
    packet_live_[slot] = false;
    free_packets_.push_back(slot);
}

void Simulator::emit(TraceEventKind kind, std::optional<NodeIndex> node, std::optional<LinkIndex> link,
                     const Packet* pkt, std::string_view detail)
{
    if (observers_.empty()) {
        return;
    }
    const TraceEvent ev{now_, kind, node, link, pkt, detail};
    for (auto* obs : observers_) {
        obs->on_event(ev);
    }
}

std::uint64_t Simulator::send(Packet pkt)
{
    if (pkt.flow >= handlers_.size()) {
        throw std::invalid_argument("packet references an unregistered flow");
    }
    if (pkt.src >= graph_.nodes().size() || pkt.dst >= graph_.nodes().size()) {
        throw std::invalid_argument("packet references an unknown node");
    }
    if (pkt.src == pkt.dst) {
        throw std::invalid_argument("packet source equals destination");
    }
    if (graph_.node(pkt.src).kind == NodeKind::SatelliteRelay
        || graph_.node(pkt.dst).kind == NodeKind::SatelliteRelay) {
        throw std::invalid_argument("satellite relays neither originate nor terminate traffic");
    }
    if (pkt.size_bytes < kMinPacketBytes) {
        throw std::invalid_argument("packet smaller than 20 bytes");
    }
    pkt.id = next_packet_id_++;
    pkt.created_at_s = now_;
    if (pkt.payload_tag == 0) {
        pkt.payload_tag = splitmix64(seed_ ^ pkt.id);
    }
    auto& fc = flow_counters_[pkt.flow];
    ++fc.injected;
    fc.bytes_injected += pkt.size_bytes;
    const auto slot = alloc_packet(pkt);
    emit(TraceEventKind::Inject, pkt.src, std::nullopt, &packets_[slot]);
    forward(pkt.src, slot);
    return pkt.id;
}

void Simulator::schedule(double at_s, std::function<void()> fn)
{
    std::uint32_t slot;
    if (!free_timers_.empty()) {
        slot = free_timers_.back();
        free_timers_.pop_back();
        timers_[slot] = std::move(fn);
    } else {
        timers_.push_back(std::move(fn));
        slot = static_cast<std::uint32_t>(timers_.size() - 1);
    }
    events_.push(std::max(at_s, now_), Event{EventType::Timer, slot, 0, 0});
}

void Simulator::forward(NodeIndex node, std::uint32_t slot)
{
    const LinkIndex l = graph_.route(node, packets_[slot].dst);
    if (l == kNoLink) {
        drop(slot, DropReason::NoRoute, node, std::nullopt);
        return;
    }
    enqueue(l, slot);
}

void Simulator::enqueue(LinkIndex link, std::uint32_t slot)
{
    auto& st = link_state_[link];
    auto& lc = link_counters_[link];
    if (!st.busy) {
        ++lc.enqueued;
        emit(TraceEventKind::Enqueue, graph_.link(link).from, link, &packets_[slot]);
        start_tx(link, slot);
        return;
    }
    if (st.queue.size() >= graph_.link(link).spec.queue_capacity_pkts) {
        drop(slot, DropReason::Queue, graph_.link(link).from, link);
        return;
    }
    ++lc.enqueued;
    emit(TraceEventKind::Enqueue, graph_.link(link).from, link, &packets_[slot]);
    st.queue.push_back(slot);
}

void Simulator::start_tx(LinkIndex link, std::uint32_t slot)
{
    auto& st = link_state_[link];
    st.busy = true;
    st.in_service = slot;
    const double tx_s = packets_[slot].size_bytes * 8.0 / graph_.link(link).spec.rate_bps;
    emit(TraceEventKind::TxStart, graph_.link(link).from, link, &packets_[slot]);
    events_.push(now_ + tx_s, Event{EventType::TxEnd, link, 0, 0});
}

double Simulator::draw_jitter_s(LinkIndex link)
{
    const auto& j = graph_.link(link).spec.jitter;
    auto& rng = link_state_[link].rng;
    switch (j.kind) {
    case JitterSpec::Kind::Constant:
        return j.a * 1e-3;
    case JitterSpec::Kind::Uniform:
        return rng.uniform(j.a, j.b) * 1e-3;
    case JitterSpec::Kind::Lognormal:
        return rng.lognormal(j.a, j.b) * 1e-3;
    }
    return 0.0;
}

void Simulator::on_tx_end(LinkIndex link)
{
    auto& st = link_state_[link];
    const Link& ln = graph_.link(link);
    const std::uint32_t slot = st.in_service;
    auto& lc = link_counters_[link];
    ++lc.transmitted;
    emit(TraceEventKind::TxEnd, ln.from, link, &packets_[slot]);

    const double u = st.rng.uniform();
    if (u < ln.spec.loss_prob) {
        drop(slot, DropReason::Loss, std::nullopt, link);
    } else {
        const double tx_s = packets_[slot].size_bytes * 8.0 / ln.spec.rate_bps;
        double arrival = now_ + ln.spec.propagation_delay_s + draw_jitter_s(link);
        // Keep the link FIFO and never let the far end receive faster than
        // the line rate.
        if (st.last_arrival_s >= 0.0) {
            arrival = std::max(arrival, st.last_arrival_s + tx_s);
        }
        st.last_arrival_s = arrival;
        events_.push(arrival, Event{EventType::Arrive, link, slot, ln.to});
    }

    if (st.queue.empty()) {
        st.busy = false;
    } else {
        const auto next = st.queue.front();
        st.queue.pop_front();
        start_tx(link, next);
    }
}

void Simulator::on_arrive(NodeIndex node, LinkIndex via, std::uint32_t slot)
{
    const Packet& pkt = packets_[slot];
    auto& lc = link_counters_[via];
    ++lc.delivered;
    lc.bytes_delivered += pkt.size_bytes;
    emit(TraceEventKind::Arrive, node, via, &pkt);
    if (pkt.dst != node) {
        forward(node, slot);
        return;
    }
    auto& fc = flow_counters_[pkt.flow];
    ++fc.delivered;
    fc.bytes_delivered += pkt.size_bytes;
    emit(TraceEventKind::Deliver, node, std::nullopt, &pkt);
    const Packet copy = pkt;
    free_packet(slot);
    if (handlers_[copy.flow]) {
        handlers_[copy.flow](copy);
    }
}

void Simulator::drop(std::uint32_t slot, DropReason reason, std::optional<NodeIndex> node,
                     std::optional<LinkIndex> link)
{
    auto& fc = flow_counters_[packets_[slot].flow];
    switch (reason) {
    case DropReason::Loss:
        ++fc.dropped_loss;
        ++link_counters_[*link].dropped_loss;
        break;
    case DropReason::Queue:
        ++fc.dropped_queue;
        ++link_counters_[*link].dropped_queue;
        break;
    case DropReason::NoRoute:
        ++fc.dropped_no_route;
        break;
    }
    emit(TraceEventKind::Drop, node, link, &packets_[slot], to_string(reason));
    free_packet(slot);
}

SimulationStats Simulator::run_until(double t_end_s)
{
    while (!events_.empty() && events_.top().time_s <= t_end_s) {
        const auto entry = events_.pop();
        now_ = entry.time_s;
        ++events_processed_;
        const Event& ev = entry.payload;
        switch (ev.type) {
        case EventType::Arrive:
            on_arrive(ev.node, ev.index, ev.slot);
            break;
        case EventType::TxEnd:
            on_tx_end(ev.index);
            break;
        case EventType::Timer: {
            auto fn = std::move(timers_[ev.index]);
            timers_[ev.index] = nullptr;
            free_timers_.push_back(ev.index);
            emit(TraceEventKind::Timer, std::nullopt, std::nullopt, nullptr);
            if (fn) {
                fn();
            }
            break;
        }
        }
    }
    if (t_end_s > now_) {
        now_ = t_end_s;
    }
    return stats();
}

SimulationStats Simulator::stats() const
{
    SimulationStats s;
    s.end_time_s = now_;
    s.events_processed = events_processed_;
    s.links = link_counters_;
    s.flows = flow_counters_;
    for (auto& f : s.flows) {
        f.in_flight_at_end = 0;
    }
    for (std::size_t i = 0; i < packets_.size(); ++i) {
        if (packet_live_[i]) {
            ++s.flows[packets_[i].flow].in_flight_at_end;
        }
    }
    return s;
}

std::optional<std::string> validate_run_duration(double duration_s, double coverage_window_s, bool handover_model)
{
    if (!(duration_s > 0.0) || !(coverage_window_s > 0.0)) {
        throw std::invalid_argument("run duration and coverage window must be positive");
    }
    if (duration_s > coverage_window_s && !handover_model) {
        return fmt::format("run duration {:g} s exceeds the {:g} s LEO coverage window and no handover "
                           "model is configured",
                           duration_s, coverage_window_s);
    }
    return std::nullopt;
}

}  // namespace ntn::netsim
