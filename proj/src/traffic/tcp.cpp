#include "ntn/traffic/tcp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ntn/netsim/simulator.hpp"

namespace ntn::traffic {

using netsim::Packet;
using netsim::PacketKind;

namespace {

// Sequence numbers count segments; all segments are full-sized.
class RenoSender {
public:
    RenoSender(netsim::Simulator& sim, const TcpOptions& opts, netsim::NodeIndex src, netsim::NodeIndex dst,
               IntervalAccumulator& retransmits, TcpFlowResult& result, bool sample_state)
        : sim_(sim), opts_(opts), src_(src), dst_(dst), retransmits_(retransmits), result_(result),
          sample_state_(sample_state), cwnd_(opts.initial_cwnd_segments), rto_(opts.initial_rto_s)
    {
        if (opts.receive_window_bytes > 0) {
            rwnd_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(opts.receive_window_bytes / opts.mss_bytes));
        }
    }

    void bind(netsim::FlowId flow) { flow_ = flow; }

    void start() { try_send(); }

    void on_ack(const Packet& ack)
    {
        const auto a = static_cast<std::int64_t>(ack.ack);
        if (a > snd_una_) {
            on_new_ack(a, ack.echo_s);
        } else if (a == snd_una_ && snd_una_ < high_sent_) {
            on_dup_ack(ack.echo_s);
        }
        if (sample_state_) {
            result_.state_samples.push_back(state());
        }
        try_send();
    }

    TcpFlowState state() const
    {
        TcpFlowState s;
        s.mss_bytes = opts_.mss_bytes;
        s.cwnd_bytes = cwnd_ * opts_.mss_bytes;
        s.ssthresh_bytes = std::isfinite(ssthresh_) ? ssthresh_ * opts_.mss_bytes
                                                    : std::numeric_limits<double>::infinity();
        s.srtt_s = srtt_;
        s.in_flight_bytes = pipe() * opts_.mss_bytes;
        s.phase = in_recovery_ ? TcpPhase::Recovery
                               : (cwnd_ < ssthresh_ ? TcpPhase::SlowStart : TcpPhase::CongestionAvoidance);
        return s;
    }

private:
    // Segments believed to be in the network: outstanding minus those the
    // duplicate ACKs report as having left it.
    double pipe() const
    {
        return std::max(0.0, static_cast<double>(snd_nxt_ - snd_una_) - inflation_);
    }

    bool may_send_new() const { return sim_.now() < opts_.duration_s; }

    void try_send()
    {
        while (pipe() + 1.0 <= cwnd_ + 1e-9) {
            if (snd_nxt_ >= high_sent_ && !may_send_new()) {
                break;
            }
            if (snd_nxt_ - snd_una_ >= rwnd_) {
                break;
            }
            transmit(snd_nxt_);
            ++snd_nxt_;
            high_sent_ = std::max(high_sent_, snd_nxt_);
        }
    }

    void transmit(std::int64_t seq)
    {
        Packet p;
        p.src = src_;
        p.dst = dst_;
        p.size_bytes = opts_.mss_bytes + netsim::kTcpIpHeaderBytes;
        p.kind = PacketKind::TcpData;
        p.flow = flow_;
        p.seq = static_cast<std::uint64_t>(seq);
        p.echo_s = sim_.now();
        p.retransmit = seq < high_sent_;
        if (!in_recovery_ && seq <= recover_) {
            stale_until_s_ = sim_.now();
        }
        if (p.retransmit) {
            ++result_.report.retransmits;
            retransmits_.add_event(sim_.now());
        }
        ++result_.report.sent_packets;
        sim_.send(p);
        arm_timer();
    }

    void on_new_ack(std::int64_t a, double echo_s)
    {
        const double sample = sim_.now() - echo_s;
        srtt_ = srtt_ <= 0.0 ? sample : 0.875 * srtt_ + 0.125 * sample;
        rto_ = std::clamp(4.0 * srtt_, opts_.min_rto_s, opts_.max_rto_s);

        const auto acked = a - snd_una_;
        snd_una_ = a;
        snd_nxt_ = std::max(snd_nxt_, snd_una_);
        dupacks_ = 0;

        if (in_recovery_) {
            if (a > recover_) {
                in_recovery_ = false;
                inflation_ = 0.0;
                cwnd_ = ssthresh_;
                result_.events.push_back({TcpEvent::Kind::RecoveryExit, sim_.now(), cwnd_ * opts_.mss_bytes,
                                          cwnd_ * opts_.mss_bytes});
            } else {
                // Partial ACK: the next hole is lost too. Only the first one
                // pushes the timer back, so long repair chains end in a timeout.
                inflation_ = std::max(0.0, inflation_ - static_cast<double>(acked) + 1.0);
                transmit(snd_una_);
                if (partial_acks_++ > 0) {
                    return;
                }
            }
        } else if (cwnd_ < ssthresh_) {
            // At most two segments per ACK, so a cumulative leap after a
            // timeout does not release a line-rate burst.
            cwnd_ += static_cast<double>(std::min<std::int64_t>(acked, 2));
        } else {
            cwnd_ += static_cast<double>(acked) / cwnd_;
        }
        restart_timer();
    }

    void on_dup_ack(double echo_s)
    {
        if (in_recovery_) {
            ++dupacks_;
            inflation_ += 1.0;
            return;
        }
        // Echoes of go-back-N copies report data the receiver already had,
        // not a new hole.
        if (echo_s <= stale_until_s_) {
            return;
        }
        ++dupacks_;
        if (dupacks_ == 3 && snd_una_ > recover_) {
            const double before = cwnd_;
            ssthresh_ = std::max(cwnd_ / 2.0, 2.0);
            cwnd_ = ssthresh_;
            recover_ = high_sent_ - 1;
            in_recovery_ = true;
            partial_acks_ = 0;
            inflation_ = 3.0;
            result_.events.push_back({TcpEvent::Kind::FastRetransmit, sim_.now(), before * opts_.mss_bytes,
                                      cwnd_ * opts_.mss_bytes});
            transmit(snd_una_);
        }
    }

    void on_timeout()
    {
        const double before = cwnd_;
        ssthresh_ = std::max(static_cast<double>(snd_nxt_ - snd_una_) / 2.0, 2.0);
        cwnd_ = 1.0;
        in_recovery_ = false;
        inflation_ = 0.0;
        dupacks_ = 0;
        recover_ = high_sent_ - 1;
        snd_nxt_ = snd_una_;
        rto_ = std::min(rto_ * 2.0, opts_.max_rto_s);
        ++result_.report.timeouts;
        result_.events.push_back({TcpEvent::Kind::Timeout, sim_.now(), before * opts_.mss_bytes,
                                  cwnd_ * opts_.mss_bytes});
        try_send();
    }

    // One pending timer event at a time; moving the deadline is free.
    void arm_timer()
    {
        if (!timer_running_) {
            restart_timer();
        }
    }

    void restart_timer()
    {
        if (snd_una_ >= high_sent_) {
            timer_running_ = false;
            return;
        }
        timer_running_ = true;
        deadline_ = sim_.now() + rto_;
        if (!timer_pending_) {
            timer_pending_ = true;
            sim_.schedule(deadline_, [this] { on_timer_event(); });
        }
    }

    void on_timer_event()
    {
        timer_pending_ = false;
        if (!timer_running_) {
            return;
        }
        if (sim_.now() + 1e-12 < deadline_) {
            timer_pending_ = true;
            sim_.schedule(deadline_, [this] { on_timer_event(); });
            return;
        }
        timer_running_ = false;
        if (snd_una_ < high_sent_) {
            on_timeout();
        }
    }

    netsim::Simulator& sim_;
    const TcpOptions& opts_;
    netsim::NodeIndex src_;
    netsim::NodeIndex dst_;
    IntervalAccumulator& retransmits_;
    TcpFlowResult& result_;
    bool sample_state_;
    netsim::FlowId flow_ = 0;

    std::int64_t snd_una_ = 0;
    std::int64_t snd_nxt_ = 0;
    std::int64_t high_sent_ = 0;
    double stale_until_s_ = -1.0;
    std::int64_t recover_ = -1;
    std::int64_t rwnd_ = std::numeric_limits<std::int64_t>::max();
    double cwnd_;
    double ssthresh_ = std::numeric_limits<double>::infinity();
    double inflation_ = 0.0;
    int dupacks_ = 0;
    int partial_acks_ = 0;
    bool in_recovery_ = false;
    double srtt_ = 0.0;
    double rto_;
    double deadline_ = 0.0;
    bool timer_running_ = false;
    bool timer_pending_ = false;
};

class CumulativeReceiver {
public:
    CumulativeReceiver(netsim::Simulator& sim, const TcpOptions& opts, netsim::NodeIndex src,
                       netsim::NodeIndex dst, IntervalAccumulator& goodput, FlowReport& report)
        : sim_(sim), opts_(opts), src_(src), dst_(dst), goodput_(goodput), report_(report)
    {
    }

    void bind(netsim::FlowId flow) { flow_ = flow; }

    void on_data(const Packet& p)
    {
        const auto seq = static_cast<std::size_t>(p.seq);
        if (seq >= received_.size()) {
            received_.resize(std::max(seq + 1, received_.size() * 2), false);
        }
        if (!received_[seq]) {
            received_[seq] = true;
            ++report_.delivered_packets;
            report_.delivered_bytes += opts_.mss_bytes;
            goodput_.add_bytes(sim_.now(), opts_.mss_bytes);
            while (rcv_nxt_ < received_.size() && received_[rcv_nxt_]) {
                ++rcv_nxt_;
            }
        }
        Packet ack;
        ack.src = dst_;
        ack.dst = src_;
        ack.size_bytes = netsim::kTcpIpHeaderBytes;
        ack.kind = PacketKind::TcpAck;
        ack.flow = flow_;
        ack.ack = rcv_nxt_;
        ack.echo_s = p.echo_s;
        sim_.send(ack);
    }

private:
    netsim::Simulator& sim_;
    const TcpOptions& opts_;
    netsim::NodeIndex src_;
    netsim::NodeIndex dst_;
    IntervalAccumulator& goodput_;
    FlowReport& report_;
    netsim::FlowId flow_ = 0;
    std::vector<bool> received_;
    std::size_t rcv_nxt_ = 0;
};

}  // namespace

TcpFlowResult run_tcp_flow(const netsim::NetGraph& graph, std::uint64_t seed, netsim::NodeIndex src,
                           netsim::NodeIndex dst, const TcpOptions& opts, netsim::Observer* observer,
                           bool sample_state)
{
    if (!graph.reachable(src, dst) || !graph.reachable(dst, src)) {
        throw TrafficError("TCP needs routes in both directions between '" + graph.node(src).id + "' and '"
                           + graph.node(dst).id + "'");
    }
    if (opts.mss_bytes == 0 || opts.initial_cwnd_segments == 0) {
        throw TrafficError("TCP needs a positive MSS and initial window");
    }
    TcpFlowResult result;
    result.report.protocol = Protocol::Tcp;
    if (!(opts.duration_s > 0.0)) {
        IntervalAccumulator empty(0.0, 0.0, opts.report_interval_s);
        result.report.intervals = empty.finish();
        return result;
    }

    netsim::Simulator sim(graph, seed);
    if (observer != nullptr) {
        sim.add_observer(observer);
    }
    IntervalAccumulator goodput(0.0, opts.duration_s, opts.report_interval_s);
    IntervalAccumulator retransmits(0.0, opts.duration_s, opts.report_interval_s);
    RenoSender sender(sim, opts, src, dst, retransmits, result, sample_state);
    CumulativeReceiver receiver(sim, opts, src, dst, goodput, result.report);
    const auto flow = sim.register_flow("tcp", [&](const Packet& p) {
        if (p.kind == PacketKind::TcpData) {
            receiver.on_data(p);
        } else if (p.kind == PacketKind::TcpAck) {
            sender.on_ack(p);
        }
    });
    sender.bind(flow);
    receiver.bind(flow);
    sim.schedule(0.0, [&sender] { sender.start(); });
    result.report.stats = sim.run_until(opts.duration_s + opts.drain_s);
    result.final_state = sender.state();

    result.report.intervals = goodput.finish();
    const auto rtx = retransmits.finish();
    for (std::size_t i = 0; i < result.report.intervals.size(); ++i) {
        result.report.intervals[i].retransmits_or_losses = rtx[i].retransmits_or_losses;
        result.report.total_bytes += result.report.intervals[i].bytes;
    }
    return result;
}

}  // namespace ntn::traffic
