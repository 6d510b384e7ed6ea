#include "ntn/netsim/graph.hpp"

#include <algorithm>
#include <cmath>

namespace ntn::netsim {

std::string_view to_string(NodeKind kind) noexcept
{
    switch (kind) {
    case NodeKind::UserTerminal:
        return "user_terminal";
    case NodeKind::SatelliteRelay:
        return "satellite_relay";
    case NodeKind::GroundStation:
        return "ground_station";
    case NodeKind::BaseStation:
        return "base_station";
    case NodeKind::CoreHost:
        return "core_host";
    }
    return "unknown";
}

std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept
{
    for (auto k : {NodeKind::UserTerminal, NodeKind::SatelliteRelay, NodeKind::GroundStation,
                   NodeKind::BaseStation, NodeKind::CoreHost}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

void JitterSpec::validate() const
{
    switch (kind) {
    case Kind::Constant:
        if (!(a >= 0.0)) {
            throw TopologyError("constant jitter must be >= 0 ms");
        }
        break;
    case Kind::Uniform:
        if (!(a >= 0.0 && b >= a)) {
            throw TopologyError("uniform jitter needs 0 <= min_ms <= max_ms");
        }
        break;
    case Kind::Lognormal:
        if (!std::isfinite(a) || !(b >= 0.0)) {
            throw TopologyError("lognormal jitter needs finite mu and sigma >= 0");
        }
        break;
    }
}

void LinkSpec::validate() const
{
    if (!(rate_bps > 0.0)) {
        throw TopologyError("link rate_bps must be positive");
    }
    if (!(propagation_delay_s >= 0.0)) {
        throw TopologyError("link propagation delay must be >= 0");
    }
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
        throw TopologyError("link loss_prob must lie in [0, 1]");
    }
    if (queue_capacity_pkts < 1) {
        throw TopologyError("link queue capacity must be >= 1 packet");
    }
    jitter.validate();
}

NodeIndex NetGraph::add_node(std::string id, NodeKind kind)
{
    if (find_node(id)) {
        throw TopologyError("duplicate node id '" + id + "'");
    }
    nodes_.push_back(Node{std::move(id), kind, {}});
    for (auto& n : nodes_) {
        n.routes.resize(nodes_.size(), kNoLink);
    }
    return static_cast<NodeIndex>(nodes_.size() - 1);
}

LinkIndex NetGraph::add_link(std::string id, NodeIndex from, NodeIndex to, LinkSpec spec)
{
    if (from >= nodes_.size() || to >= nodes_.size()) {
        throw TopologyError("link '" + id + "' references an unknown node");
    }
    if (from == to) {
        throw TopologyError("link '" + id + "' is a self-loop");
    }
    if (find_link(id)) {
        throw TopologyError("duplicate link id '" + id + "'");
    }
    spec.validate();
    links_.push_back(Link{std::move(id), from, to, spec});
    return static_cast<LinkIndex>(links_.size() - 1);
}

void NetGraph::set_route(NodeIndex at, NodeIndex dst, LinkIndex via)
{
    if (at >= nodes_.size() || dst >= nodes_.size() || via >= links_.size()) {
        throw TopologyError("route references an unknown node or link");
    }
    if (links_[via].from != at) {
        throw TopologyError("route at '" + nodes_[at].id + "' uses link '" + links_[via].id
                            + "' that does not leave it");
    }
    nodes_[at].routes[dst] = via;
}

void NetGraph::add_route_path(const std::vector<NodeIndex>& path)
{
    if (path.size() < 2) {
        throw TopologyError("a route path needs at least two nodes");
    }
    const NodeIndex dst = path.back();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        auto l = link_between(path[i], path[i + 1]);
        if (!l) {
            throw TopologyError("no link from '" + nodes_.at(path[i]).id + "' to '"
                                + nodes_.at(path[i + 1]).id + "'");
        }
        set_route(path[i], dst, *l);
    }
}

std::optional<NodeIndex> NetGraph::find_node(std::string_view id) const
{
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) {
            return static_cast<NodeIndex>(i);
        }
    }
    return std::nullopt;
}

NodeIndex NetGraph::node_index(std::string_view id) const
{
    auto n = find_node(id);
    if (!n) {
        throw TopologyError("unknown node '" + std::string(id) + "'");
    }
    return *n;
}

std::optional<LinkIndex> NetGraph::find_link(std::string_view id) const
{
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].id == id) {
            return static_cast<LinkIndex>(i);
        }
    }
    return std::nullopt;
}

std::optional<LinkIndex> NetGraph::link_between(NodeIndex from, NodeIndex to) const
{
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].from == from && links_[i].to == to) {
            return static_cast<LinkIndex>(i);
        }
    }
    return std::nullopt;
}

LinkIndex NetGraph::route(NodeIndex at, NodeIndex dst) const
{
    return nodes_.at(at).routes.at(dst);
}

std::vector<NodeIndex> NetGraph::path(NodeIndex src, NodeIndex dst) const
{
    std::vector<NodeIndex> hops{src};
    if (src == dst) {
        return {};
    }
    NodeIndex at = src;
    while (at != dst) {
        const LinkIndex l = route(at, dst);
        if (l == kNoLink || hops.size() > nodes_.size()) {
            return {};
        }
        at = links_[l].to;
        hops.push_back(at);
    }
    return hops;
}

bool NetGraph::reachable(NodeIndex src, NodeIndex dst) const
{
    return !path(src, dst).empty();
}

double NetGraph::bottleneck_rate_bps(NodeIndex src, NodeIndex dst) const
{
    const auto hops = path(src, dst);
    if (hops.empty()) {
        throw TopologyError("no route from '" + nodes_.at(src).id + "' to '" + nodes_.at(dst).id + "'");
    }
    double rate = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
        rate = std::min(rate, links_[route(hops[i], dst)].spec.rate_bps);
    }
    return rate;
}

}  // namespace ntn::netsim
