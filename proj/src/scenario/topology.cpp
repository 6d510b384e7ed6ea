#include "ntn/scenario/topology.hpp"

#include <fmt/format.h>

#include "ntn/geometry.hpp"

namespace ntn::scenario {

namespace {

linkbudget::PathLossBreakdown hop_losses(const ScenarioConfig& c, double freq_ghz, double distance_m)
{
    auto losses = c.link_budget.losses;
    losses.fspl_db = linkbudget::fspl_db(freq_ghz, distance_m);
    return losses;
}

void require_pair(const netsim::NetGraph& g, const std::string& a, const std::string& b, const char* what)
{
    const auto ia = g.find_node(a);
    const auto ib = g.find_node(b);
    if (!ia || !ib) {
        throw netsim::TopologyError(fmt::format("{} endpoint '{}' is not a node", what, !ia ? a : b));
    }
    if (*ia == *ib) {
        throw netsim::TopologyError(fmt::format("{} starts and ends at node '{}'", what, a));
    }
    if (!g.reachable(*ia, *ib)) {
        throw netsim::TopologyError(fmt::format("{}: no route from '{}' to '{}'", what, a, b));
    }
    if (!g.reachable(*ib, *ia)) {
        throw netsim::TopologyError(fmt::format("{}: no route from '{}' to '{}'", what, b, a));
    }
}

}  // namespace

double service_link_distance_m(const ScenarioConfig& config) { return geometry::slant_range(config.geometry); }

HopBudget downlink_budget(const ScenarioConfig& c)
{
    HopBudget h;
    h.name = "downlink";
    h.distance_m = service_link_distance_m(c);
    h.params.carrier_freq_ghz = c.link_budget.freq_dl_ghz;
    h.params.bandwidth_hz = c.link_budget.bandwidth_dl_hz;
    h.params.eirp_dbw = c.link_budget.eirp_dbw;
    h.params.eirp_dbm = c.link_budget.eirp_dbm;
    h.params.figure_of_merit_db_per_k = c.link_budget.merit_figure_db_per_k;
    h.params.losses = hop_losses(c, h.params.carrier_freq_ghz, h.distance_m);
    h.result = linkbudget::evaluate(h.params);
    h.share_factor = c.link_budget.dl_share_factor;
    h.effective_rate_bps = linkbudget::effective_link_rate_bps(h.result.capacity_bps, h.share_factor);
    return h;
}

HopBudget uplink_budget(const ScenarioConfig& c, linkbudget::TerminalKind profile)
{
    const auto* t = c.terminal(profile);
    if (t == nullptr) {
        throw ScenarioError({fmt::format("terminal profile '{}' is not defined", linkbudget::to_string(profile))});
    }
    HopBudget h;
    h.name = fmt::format("uplink/{}", linkbudget::to_string(profile));
    h.distance_m = service_link_distance_m(c);
    h.params.carrier_freq_ghz = c.link_budget.freq_ul_ghz;
    h.params.bandwidth_hz = c.link_budget.bandwidth_ul_hz;
    h.params.eirp_dbw = t->profile.eirp_dbw();
    h.params.figure_of_merit_db_per_k = c.link_budget.merit_figure_db_per_k;
    h.params.losses = hop_losses(c, h.params.carrier_freq_ghz, h.distance_m);
    h.result = linkbudget::evaluate(h.params);
    h.share_factor = t->ul_share_factor;
    h.effective_rate_bps = linkbudget::effective_link_rate_bps(h.result.capacity_bps, h.share_factor);
    h.rate_override_bps = t->ul_rate_override_bps;
    return h;
}

netsim::NetGraph build_topology(const ScenarioConfig& c, linkbudget::TerminalKind profile)
{
    netsim::NetGraph g;
    for (const auto& n : c.topology.nodes) {
        g.add_node(n.id, n.kind);
    }

    std::optional<double> slant_delay;
    std::optional<HopBudget> dl;
    std::optional<HopBudget> ul;
    for (const auto& l : c.topology.links) {
        const auto from = g.find_node(l.from);
        const auto to = g.find_node(l.to);
        if (!from || !to) {
            throw netsim::TopologyError(fmt::format("link '{}' references an unknown node", l.id));
        }
        netsim::LinkSpec spec;
        switch (l.delay_source) {
        case DelaySource::Fixed:
            spec.propagation_delay_s = l.delay_s;
            break;
        case DelaySource::Distance:
            spec.propagation_delay_s = geometry::propagation_delay(l.distance_m);
            break;
        case DelaySource::SlantRange:
            if (!slant_delay) {
                slant_delay = geometry::propagation_delay(service_link_distance_m(c));
            }
            spec.propagation_delay_s = *slant_delay;
            break;
        }
        spec.jitter = l.jitter;
        spec.loss_prob = l.loss_prob;
        spec.queue_capacity_pkts = l.queue_pkts;
        switch (l.rate_source) {
        case RateSource::Fixed:
            spec.rate_bps = l.rate_bps;
            break;
        case RateSource::Downlink:
            if (!dl) {
                dl = downlink_budget(c);
            }
            spec.rate_bps = dl->link_rate_bps();
            break;
        case RateSource::Uplink: {
            if (!ul) {
                ul = uplink_budget(c, profile);
            }
            const auto* t = c.terminal(profile);
            spec.rate_bps = ul->link_rate_bps();
            spec.jitter = t->ul_jitter;
            spec.loss_prob = t->ul_loss_prob;
            spec.queue_capacity_pkts = t->ul_queue_pkts;
            break;
        }
        }
        g.add_link(l.id, *from, *to, spec);
    }

    for (const auto& r : c.topology.routes) {
        std::vector<netsim::NodeIndex> path;
        path.reserve(r.size());
        for (const auto& id : r) {
            path.push_back(g.node_index(id));
        }
        g.add_route_path(path);
    }

    require_pair(g, c.traffic.terminal, c.traffic.server, "traffic");
    if (c.traffic.ping) {
        require_pair(g, c.traffic.ping->src, c.traffic.ping->dst, "ping");
    }
    return g;
}

}  // namespace ntn::scenario
