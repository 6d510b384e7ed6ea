#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ntn/netsim/event_queue.hpp"
#include "ntn/netsim/graph.hpp"
#include "ntn/netsim/packet.hpp"
#include "ntn/rng.hpp"

namespace ntn::netsim {

enum class DropReason : std::uint8_t { Loss, Queue, NoRoute };
std::string_view to_string(DropReason reason) noexcept;

struct LinkCounters {
    std::uint64_t enqueued = 0;
    std::uint64_t transmitted = 0;
    std::uint64_t delivered = 0;  // reached the far end of the link
    std::uint64_t dropped_loss = 0;
    std::uint64_t dropped_queue = 0;
    std::uint64_t bytes_delivered = 0;
    bool operator==(const LinkCounters&) const = default;
};

struct FlowCounters {
    std::string label;
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_loss = 0;
    std::uint64_t dropped_queue = 0;
    std::uint64_t dropped_no_route = 0;
    std::uint64_t in_flight_at_end = 0;
    std::uint64_t bytes_injected = 0;
    std::uint64_t bytes_delivered = 0;
    bool operator==(const FlowCounters&) const = default;
};

struct SimulationStats {
    double end_time_s = 0.0;
    std::uint64_t events_processed = 0;
    std::vector<LinkCounters> links;
    std::vector<FlowCounters> flows;

    bool operator==(const SimulationStats&) const = default;
    /// Stable text rendering, one counter line per link and flow.
    std::string to_text(const NetGraph& graph) const;
};

enum class TraceEventKind : std::uint8_t { Inject, Enqueue, TxStart, TxEnd, Arrive, Deliver, Drop, Timer };
std::string_view to_string(TraceEventKind kind) noexcept;

struct TraceEvent {
    double time_s = 0.0;
    TraceEventKind event = TraceEventKind::Timer;
    std::optional<NodeIndex> node;
    std::optional<LinkIndex> link;
    const Packet* packet = nullptr;
    std::string_view detail;
};

class Observer {
public:
    virtual ~Observer() = default;
    virtual void on_event(const TraceEvent& ev) = 0;
};

/// Single-threaded discrete-event packet network. Each directed link owns a
/// drop-tail FIFO, a serializer, and one random stream keyed by
/// derive_seed(seed, link id); loss and jitter are drawn from that stream
/// when a packet finishes serialization.
class Simulator {
public:
    using DeliveryHandler = std::function<void(const Packet&)>;

    Simulator(NetGraph graph, std::uint64_t seed);

    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    double now() const noexcept { return now_; }
    const NetGraph& graph() const noexcept { return graph_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Registers an application flow. The handler runs whenever a packet of
    /// the flow reaches its destination node.
    FlowId register_flow(std::string label, DeliveryHandler on_deliver);

    /// Injects a packet at pkt.src at the current time. Assigns id and
    /// creation time; a zero payload_tag is replaced by a unique token.
    std::uint64_t send(Packet pkt);

    void schedule(double at_s, std::function<void()> fn);

    void add_observer(Observer* obs) { observers_.push_back(obs); }

    /// Processes every event with timestamp <= t_end_s.
    SimulationStats run_until(double t_end_s);

    SimulationStats stats() const;

private:
    enum class EventType : std::uint8_t { Arrive, TxEnd, Timer };
    struct Event {
        EventType type;
        std::uint32_t index;  // link for TxEnd and Arrive, timer slot for Timer
        std::uint32_t slot;   // packet slot for Arrive
        NodeIndex node;
    };

    struct LinkState {
        std::deque<std::uint32_t> queue;
        bool busy = false;
        std::uint32_t in_service = 0;
        double last_arrival_s = -1.0;
        RandomStream rng;
    };

    std::uint32_t alloc_packet(const Packet& p);
    void free_packet(std::uint32_t slot);
    void forward(NodeIndex node, std::uint32_t slot);
    void enqueue(LinkIndex link, std::uint32_t slot);
    void start_tx(LinkIndex link, std::uint32_t slot);
    void on_tx_end(LinkIndex link);
    void on_arrive(NodeIndex node, LinkIndex via, std::uint32_t slot);
    void drop(std::uint32_t slot, DropReason reason, std::optional<NodeIndex> node, std::optional<LinkIndex> link);
    double draw_jitter_s(LinkIndex link);
    void emit(TraceEventKind kind, std::optional<NodeIndex> node, std::optional<LinkIndex> link,
              const Packet* pkt, std::string_view detail = {});

    NetGraph graph_;
    std::uint64_t seed_;
    double now_ = 0.0;
    std::uint64_t events_processed_ = 0;
    std::uint64_t next_packet_id_ = 1;

    EventQueue<Event> events_;
    std::vector<LinkState> link_state_;
    std::vector<LinkCounters> link_counters_;
    std::vector<FlowCounters> flow_counters_;
    std::vector<DeliveryHandler> handlers_;

    std::vector<Packet> packets_;
    std::vector<bool> packet_live_;
    std::vector<std::uint32_t> free_packets_;

    std::vector<std::function<void()>> timers_;
    std::vector<std::uint32_t> free_timers_;

    std::vector<Observer*> observers_;
};

/// Duration check against a LEO spot-coverage window. Returns a warning when
/// the run outlasts the window with no handover model; equality is fine.
std::optional<std::string> validate_run_duration(double duration_s, double coverage_window_s,
                                                 bool handover_model = false);

}  // namespace ntn::netsim
