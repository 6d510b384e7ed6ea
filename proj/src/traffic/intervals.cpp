#include "ntn/traffic/report.hpp"

#include <algorithm>
#include <cmath>

namespace ntn::traffic {

std::string_view to_string(Protocol p) noexcept
{
    return p == Protocol::Tcp ? "tcp" : "udp";
}

std::string_view to_string(Direction d) noexcept
{
    return d == Direction::Downlink ? "dl" : "ul";
}

IntervalAccumulator::IntervalAccumulator(double flow_start_s, double duration_s, double interval_s)
    : start_(flow_start_s), duration_(duration_s), interval_(interval_s)
{
    if (!(interval_s > 0.0)) {
        throw TrafficError("report interval must be positive");
    }
    if (!(duration_s >= 0.0)) {
        throw TrafficError("flow duration must be >= 0");
    }
    const auto n = static_cast<std::size_t>(std::ceil(duration_s / interval_s - 1e-9));
    bytes_.assign(n, 0);
    events_.assign(n, 0);
}

std::optional<std::size_t> IntervalAccumulator::bucket(double at_s) const
{
    const double rel = at_s - start_;
    if (rel < 0.0 || rel >= duration_) {
        return std::nullopt;
    }
    const auto i = static_cast<std::size_t>(std::floor(rel / interval_));
    return std::min(i, bytes_.size() - 1);
}

void IntervalAccumulator::add_bytes(double at_s, std::uint64_t bytes)
{
    if (auto i = bucket(at_s)) {
        bytes_[*i] += bytes;
    }
}

void IntervalAccumulator::add_event(double at_s, std::uint64_t count)
{
    if (auto i = bucket(at_s)) {
        events_[*i] += count;
    }
}

std::vector<IntervalReport> IntervalAccumulator::finish() const
{
    std::vector<IntervalReport> out;
    out.reserve(bytes_.size());
    for (std::size_t i = 0; i < bytes_.size(); ++i) {
        IntervalReport r;
        r.interval_start_s = static_cast<double>(i) * interval_;
        r.interval_end_s = std::min(static_cast<double>(i + 1) * interval_, duration_);
        r.bytes = bytes_[i];
        r.throughput_mbps = static_cast<double>(r.bytes) * 8.0 / (r.interval_end_s - r.interval_start_s) / 1e6;
        r.retransmits_or_losses = events_[i];
        out.push_back(r);
    }
    return out;
}

double FlowReport::peak_mbps() const noexcept
{
    double best = 0.0;
    for (const auto& r : intervals) {
        best = std::max(best, r.throughput_mbps);
    }
    return best;
}

double FlowReport::min_mbps() const noexcept
{
    if (intervals.empty()) {
        return 0.0;
    }
    double lo = intervals.front().throughput_mbps;
    for (const auto& r : intervals) {
        lo = std::min(lo, r.throughput_mbps);
    }
    return lo;
}

double FlowReport::mean_mbps() const noexcept
{
    if (intervals.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& r : intervals) {
        sum += r.throughput_mbps;
    }
    return sum / static_cast<double>(intervals.size());
}

}  // namespace ntn::traffic
