#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ntn::netsim {

using NodeIndex = std::uint32_t;
using LinkIndex = std::uint32_t;
inline constexpr LinkIndex kNoLink = std::numeric_limits<LinkIndex>::max();

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class NodeKind { UserTerminal, SatelliteRelay, GroundStation, BaseStation, CoreHost };

std::string_view to_string(NodeKind kind) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view name) noexcept;

/// Per-packet additive delay distribution; parameters in milliseconds.
/// Lognormal takes mu and sigma of the underlying normal of ln(delay_ms).
struct JitterSpec {
    enum class Kind { Constant, Uniform, Lognormal };
    Kind kind = Kind::Constant;
    double a = 0.0;  // constant: value_ms | uniform: min_ms | lognormal: mu
    double b = 0.0;  // uniform: max_ms | lognormal: sigma

    static JitterSpec none() noexcept { return {}; }
    static JitterSpec constant(double ms) noexcept { return {Kind::Constant, ms, 0.0}; }
    static JitterSpec uniform(double lo_ms, double hi_ms) noexcept { return {Kind::Uniform, lo_ms, hi_ms}; }
    static JitterSpec lognormal(double mu, double sigma) noexcept { return {Kind::Lognormal, mu, sigma}; }

    bool is_deterministic() const noexcept { return kind == Kind::Constant; }
    void validate() const;
    bool operator==(const JitterSpec&) const = default;
};

struct LinkSpec {
    double propagation_delay_s = 0.0;
    double rate_bps = 1e9;
    JitterSpec jitter;
    double loss_prob = 0.0;
    std::uint32_t queue_capacity_pkts = 100;

    void validate() const;
    bool operator==(const LinkSpec&) const = default;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::CoreHost;
    // routes[dst] = outgoing link, kNoLink when absent.
    std::vector<LinkIndex> routes;
};

struct Link {
    std::string id;
    NodeIndex from = 0;
    NodeIndex to = 0;
    LinkSpec spec;
};

/// Directed multigraph with static next-hop routing tables.
class NetGraph {
public:
    NodeIndex add_node(std::string id, NodeKind kind);
    LinkIndex add_link(std::string id, NodeIndex from, NodeIndex to, LinkSpec spec);

    /// Installs next hops so every node on `path` forwards toward its last
    /// element. Consecutive nodes must be joined by a link.
    void add_route_path(const std::vector<NodeIndex>& path);
    void set_route(NodeIndex at, NodeIndex dst, LinkIndex via);

    std::optional<NodeIndex> find_node(std::string_view id) const;
    NodeIndex node_index(std::string_view id) const;
    std::optional<LinkIndex> find_link(std::string_view id) const;
    std::optional<LinkIndex> link_between(NodeIndex from, NodeIndex to) const;

    LinkIndex route(NodeIndex at, NodeIndex dst) const;

    /// Follows next hops from src to dst. Empty when unreachable or looping.
    std::vector<NodeIndex> path(NodeIndex src, NodeIndex dst) const;
    bool reachable(NodeIndex src, NodeIndex dst) const;

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    const Node& node(NodeIndex i) const { return nodes_.at(i); }
    const Link& link(LinkIndex i) const { return links_.at(i); }
    Link& mutable_link(LinkIndex i) { return links_.at(i); }

    /// Smallest rate over the links of a routed path.
    double bottleneck_rate_bps(NodeIndex src, NodeIndex dst) const;

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
};

}  // namespace ntn::netsim
