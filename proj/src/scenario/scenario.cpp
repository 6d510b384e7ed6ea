#include "ntn/scenario/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "ntn/netsim/simulator.hpp"
#include "ntn/scenario/topology.hpp"

namespace ntn::scenario {

namespace {

std::string join_lines(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) {
            out += '\n';
        }
        out += l;
    }
    return out;
}

std::optional<traffic::Protocol> parse_protocol(std::string_view s)
{
    if (s == "tcp") {
        return traffic::Protocol::Tcp;
    }
    if (s == "udp") {
        return traffic::Protocol::Udp;
    }
    return std::nullopt;
}

std::optional<traffic::Direction> parse_direction(std::string_view s)
{
    if (s == "dl") {
        return traffic::Direction::Downlink;
    }
    if (s == "ul") {
        return traffic::Direction::Uplink;
    }
    return std::nullopt;
}

// Walks a YAML document, recording every problem instead of stopping at the
// first one. Messages carry the source line and the dotted key path.
class Reader {
public:
    std::vector<std::string> errors;

    void error(const YAML::Node& at, const std::string& path, const std::string& msg)
    {
        const auto mark = at.Mark();
        if (mark.line >= 0) {
            errors.push_back(fmt::format("line {}: '{}': {}", mark.line + 1, path, msg));
        } else {
            errors.push_back(fmt::format("'{}': {}", path, msg));
        }
    }

    bool map(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> allowed)
    {
        if (!n.IsMap()) {
            error(n, path, "expected a mapping");
            return false;
        }
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>("");
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                error(kv.first, sub(path, key), "unknown key");
            }
        }
        return true;
    }

    template <class T>
    bool scalar(const YAML::Node& parent, const std::string& path, const char* key, T& out, bool required = false)
    {
        const auto n = parent[key];
        if (!n) {
            if (required) {
                error(parent, sub(path, key), "missing required key");
            }
            return false;
        }
        if (!n.IsScalar()) {
            error(n, sub(path, key), "expected a scalar");
            return false;
        }
        try {
            out = n.as<T>();
        } catch (const YAML::Exception&) {
            error(n, sub(path, key), fmt::format("cannot convert '{}'", n.Scalar()));
            return false;
        }
        return true;
    }

    template <class T>
    void optional_scalar(const YAML::Node& parent, const std::string& path, const char* key, std::optional<T>& out)
    {
        T v{};
        if (scalar(parent, path, key, v)) {
            out = v;
        }
    }

    static std::string sub(const std::string& path, std::string_view key)
    {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }
};

void read_jitter(Reader& r, const YAML::Node& n, const std::string& path, netsim::JitterSpec& out)
{
    if (!r.map(n, path, {"kind", "value_ms", "min_ms", "max_ms", "mu", "sigma"})) {
        return;
    }
    std::string kind;
    if (!r.scalar(n, path, "kind", kind, true)) {
        return;
    }
    if (kind == "none") {
        out = netsim::JitterSpec::none();
    } else if (kind == "constant") {
        double v = 0.0;
        r.scalar(n, path, "value_ms", v, true);
        out = netsim::JitterSpec::constant(v);
    } else if (kind == "uniform") {
        double lo = 0.0;
        double hi = 0.0;
        r.scalar(n, path, "min_ms", lo, true);
        r.scalar(n, path, "max_ms", hi, true);
        out = netsim::JitterSpec::uniform(lo, hi);
    } else if (kind == "lognormal") {
        double mu = 0.0;
        double sigma = 0.0;
        r.scalar(n, path, "mu", mu, true);
        r.scalar(n, path, "sigma", sigma, true);
        out = netsim::JitterSpec::lognormal(mu, sigma);
    } else {
        r.error(n["kind"], Reader::sub(path, "kind"), "expected none, constant, uniform or lognormal");
    }
}

void read_geometry(Reader& r, const YAML::Node& n, geometry::OrbitGeometry& g)
{
    const std::string path = "geometry";
    if (!r.map(n, path, {"elevation_deg", "altitude_m", "earth_radius_m"})) {
        return;
    }
    g.elevation_deg = 70.0;
    r.scalar(n, path, "elevation_deg", g.elevation_deg);
    r.scalar(n, path, "altitude_m", g.altitude_m, true);
    r.scalar(n, path, "earth_radius_m", g.earth_radius_m);
}

void read_link_budget(Reader& r, const YAML::Node& n, LinkBudgetBlock& b)
{
    const std::string path = "link_budget";
    if (!r.map(n, path,
               {"freq_isl_ghz", "freq_dl_ghz", "freq_ul_ghz", "bandwidth_dl_hz", "bandwidth_ul_hz", "eirp_dbw",
                "eirp_dbm", "merit_figure_db_per_k", "gnb_tx_power_dbm", "gs_rx_antenna_gain_dbi",
                "gs_tx_antenna_gain_dbi", "entry_loss_db", "atm_loss_db", "scint_loss_db", "shadow_loss_db",
                "polarization_loss_db", "misalignment_loss_db", "dl_share_factor"})) {
        return;
    }
    r.scalar(n, path, "freq_isl_ghz", b.freq_isl_ghz);
    r.scalar(n, path, "freq_dl_ghz", b.freq_dl_ghz);
    r.scalar(n, path, "freq_ul_ghz", b.freq_ul_ghz);
    r.scalar(n, path, "bandwidth_dl_hz", b.bandwidth_dl_hz);
    r.scalar(n, path, "bandwidth_ul_hz", b.bandwidth_ul_hz);
    const bool has_dbw = r.scalar(n, path, "eirp_dbw", b.eirp_dbw);
    double dbm = 0.0;
    if (r.scalar(n, path, "eirp_dbm", dbm)) {
        b.eirp_dbm = dbm;
    } else if (has_dbw) {
        // A lone dBW value must not be checked against the default dBm one.
        b.eirp_dbm.reset();
    }
    r.scalar(n, path, "merit_figure_db_per_k", b.merit_figure_db_per_k);
    r.scalar(n, path, "gnb_tx_power_dbm", b.gnb_tx_power_dbm);
    r.scalar(n, path, "gs_rx_antenna_gain_dbi", b.gs_rx_antenna_gain_dbi);
    r.scalar(n, path, "gs_tx_antenna_gain_dbi", b.gs_tx_antenna_gain_dbi);
    r.scalar(n, path, "entry_loss_db", b.losses.entry_db);
    r.scalar(n, path, "atm_loss_db", b.losses.atm_db);
    r.scalar(n, path, "scint_loss_db", b.losses.scint_db);
    r.scalar(n, path, "shadow_loss_db", b.losses.shadow_db);
    r.scalar(n, path, "polarization_loss_db", b.losses.polarization_db);
    r.scalar(n, path, "misalignment_loss_db", b.losses.misalignment_db);
    r.scalar(n, path, "dl_share_factor", b.dl_share_factor);
}

void read_terminal(Reader& r, const YAML::Node& n, const std::string& path, linkbudget::TerminalKind kind,
                   TerminalConfig& t)
{
    t.profile = linkbudget::TerminalProfile::reference_default(kind);
    if (n.IsNull()) {
        return;
    }
    if (!r.map(n, path, {"tx_power_dbm", "tx_antenna_gain_dbi", "rx_antenna_gain_dbi", "uplink"})) {
        return;
    }
    r.scalar(n, path, "tx_power_dbm", t.profile.tx_power_dbm);
    r.scalar(n, path, "tx_antenna_gain_dbi", t.profile.tx_antenna_gain_dbi);
    r.scalar(n, path, "rx_antenna_gain_dbi", t.profile.rx_antenna_gain_dbi);
    if (const auto ul = n["uplink"]) {
        const auto p = Reader::sub(path, "uplink");
        if (r.map(ul, p, {"share_factor", "rate_override_bps", "loss_prob", "jitter", "queue_pkts"})) {
            r.scalar(ul, p, "share_factor", t.ul_share_factor);
            r.optional_scalar(ul, p, "rate_override_bps", t.ul_rate_override_bps);
            r.scalar(ul, p, "loss_prob", t.ul_loss_prob);
            r.scalar(ul, p, "queue_pkts", t.ul_queue_pkts);
            if (const auto j = ul["jitter"]) {
                read_jitter(r, j, Reader::sub(p, "jitter"), t.ul_jitter);
            }
        }
    }
}

void read_topology(Reader& r, const YAML::Node& n, TopologyConfig& topo)
{
    const std::string path = "topology";
    if (!r.map(n, path, {"nodes", "links", "routes"})) {
        return;
    }
    const auto nodes = n["nodes"];
    if (!nodes || !nodes.IsSequence()) {
        r.error(n, Reader::sub(path, "nodes"), "expected a list of nodes");
    } else {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto p = fmt::format("topology.nodes[{}]", i);
            const auto e = nodes[i];
            if (!r.map(e, p, {"id", "kind"})) {
                continue;
            }
            NodeConfig node;
            std::string kind;
            r.scalar(e, p, "id", node.id, true);
            if (r.scalar(e, p, "kind", kind, true)) {
                if (const auto k = netsim::parse_node_kind(kind)) {
                    node.kind = *k;
                } else {
                    r.error(e["kind"], Reader::sub(p, "kind"), fmt::format("unknown node kind '{}'", kind));
                }
            }
            topo.nodes.push_back(std::move(node));
        }
    }

    const auto links = n["links"];
    if (!links || !links.IsSequence()) {
        r.error(n, Reader::sub(path, "links"), "expected a list of links");
    } else {
        for (std::size_t i = 0; i < links.size(); ++i) {
            const auto p = fmt::format("topology.links[{}]", i);
            const auto e = links[i];
            if (!r.map(e, p,
                       {"id", "from", "to", "delay_s", "distance_m", "propagation", "rate_bps", "rate_from",
                        "jitter", "loss_prob", "queue_pkts"})) {
                continue;
            }
            LinkConfig link;
            r.scalar(e, p, "id", link.id, true);
            r.scalar(e, p, "from", link.from, true);
            r.scalar(e, p, "to", link.to, true);

            int delay_keys = 0;
            if (r.scalar(e, p, "delay_s", link.delay_s)) {
                link.delay_source = DelaySource::Fixed;
                ++delay_keys;
            }
            if (r.scalar(e, p, "distance_m", link.distance_m)) {
                link.delay_source = DelaySource::Distance;
                ++delay_keys;
            }
            std::string prop;
            if (r.scalar(e, p, "propagation", prop)) {
                ++delay_keys;
                if (prop == "slant_range") {
                    link.delay_source = DelaySource::SlantRange;
                } else {
                    r.error(e["propagation"], Reader::sub(p, "propagation"), "only 'slant_range' is supported");
                }
            }
            if (delay_keys != 1) {
                r.error(e, p, "exactly one of delay_s, distance_m, propagation is required");
            }

            int rate_keys = 0;
            if (r.scalar(e, p, "rate_bps", link.rate_bps)) {
                link.rate_source = RateSource::Fixed;
                ++rate_keys;
            }
            std::string from;
            if (r.scalar(e, p, "rate_from", from)) {
                ++rate_keys;
                if (from == "downlink") {
                    link.rate_source = RateSource::Downlink;
                } else if (from == "uplink") {
                    link.rate_source = RateSource::Uplink;
                } else {
                    r.error(e["rate_from"], Reader::sub(p, "rate_from"), "expected 'downlink' or 'uplink'");
                }
            }
            if (rate_keys != 1) {
                r.error(e, p, "exactly one of rate_bps, rate_from is required");
            }
            if (const auto j = e["jitter"]) {
                read_jitter(r, j, Reader::sub(p, "jitter"), link.jitter);
            }
            r.scalar(e, p, "loss_prob", link.loss_prob);
            r.scalar(e, p, "queue_pkts", link.queue_pkts);
            topo.links.push_back(std::move(link));
        }
    }

    const auto routes = n["routes"];
    if (!routes || !routes.IsSequence()) {
        r.error(n, Reader::sub(path, "routes"), "expected a list of node paths");
    } else {
        for (std::size_t i = 0; i < routes.size(); ++i) {
            const auto p = fmt::format("topology.routes[{}]", i);
            try {
                topo.routes.push_back(routes[i].as<std::vector<std::string>>());
            } catch (const YAML::Exception&) {
                r.error(routes[i], p, "expected a list of node ids");
            }
        }
    }
}

void read_traffic(Reader& r, const YAML::Node& n, TrafficConfig& t)
{
    const std::string path = "traffic";
    if (!r.map(n, path, {"terminal", "server", "ping", "tcp", "flows"})) {
        return;
    }
    r.scalar(n, path, "terminal", t.terminal, true);
    r.scalar(n, path, "server", t.server, true);
    if (const auto pn = n["ping"]) {
        const std::string p = "traffic.ping";
        if (r.map(pn, p, {"src", "dst", "count", "interval_s", "payload_bytes", "timeout_s"})) {
            PingConfig ping;
            ping.src = t.terminal;
            ping.dst = t.server;
            r.scalar(pn, p, "src", ping.src);
            r.scalar(pn, p, "dst", ping.dst);
            r.scalar(pn, p, "count", ping.count);
            r.scalar(pn, p, "interval_s", ping.interval_s);
            r.scalar(pn, p, "payload_bytes", ping.payload_bytes);
            r.scalar(pn, p, "timeout_s", ping.timeout_s);
            t.ping = ping;
        }
    }
    if (const auto tn = n["tcp"]) {
        const std::string p = "traffic.tcp";
        if (r.map(tn, p, {"mss_bytes", "initial_cwnd_segments", "receive_window_bytes", "min_rto_s"})) {
            r.scalar(tn, p, "mss_bytes", t.tcp.mss_bytes);
            r.scalar(tn, p, "initial_cwnd_segments", t.tcp.initial_cwnd_segments);
            r.scalar(tn, p, "receive_window_bytes", t.tcp.receive_window_bytes);
            r.scalar(tn, p, "min_rto_s", t.tcp.min_rto_s);
        }
    }
    if (const auto fl = n["flows"]) {
        if (!fl.IsSequence()) {
            r.error(fl, "traffic.flows", "expected a list of flows");
            return;
        }
        for (std::size_t i = 0; i < fl.size(); ++i) {
            const auto p = fmt::format("traffic.flows[{}]", i);
            const auto e = fl[i];
            if (!r.map(e, p,
                       {"id", "protocol", "direction", "duration_s", "report_interval_s", "target_rate_bps",
                        "datagram_bytes"})) {
                continue;
            }
            FlowConfig f;
            r.scalar(e, p, "id", f.id, true);
            std::string s;
            if (r.scalar(e, p, "protocol", s, true)) {
                if (const auto v = parse_protocol(s)) {
                    f.protocol = *v;
                } else {
                    r.error(e["protocol"], Reader::sub(p, "protocol"), "expected 'tcp' or 'udp'");
                }
            }
            if (r.scalar(e, p, "direction", s, true)) {
                if (const auto v = parse_direction(s)) {
                    f.direction = *v;
                } else {
                    r.error(e["direction"], Reader::sub(p, "direction"), "expected 'dl' or 'ul'");
                }
            }
            r.scalar(e, p, "duration_s", f.duration_s);
            r.scalar(e, p, "report_interval_s", f.report_interval_s);
            r.scalar(e, p, "target_rate_bps", f.target_rate_bps, f.protocol == traffic::Protocol::Udp);
            r.scalar(e, p, "datagram_bytes", f.datagram_bytes);
            t.flows.push_back(std::move(f));
        }
    }
}

void read_powerctl(Reader& r, const YAML::Node& n, PowerControlConfig& pc)
{
    const std::string path = "powerctl";
    if (!r.map(n, path, {"instance", "interference_mode", "tol", "max_iter", "grid_levels"})) {
        return;
    }
    r.scalar(n, path, "instance", pc.instance, true);
    std::string mode;
    if (r.scalar(n, path, "interference_mode", mode)) {
        try {
            pc.mode = powerctl::parse_interference_mode(mode);
        } catch (const std::exception& e) {
            r.error(n["interference_mode"], Reader::sub(path, "interference_mode"), e.what());
        }
    }
    r.scalar(n, path, "tol", pc.tol);
    r.scalar(n, path, "max_iter", pc.max_iter);
    r.scalar(n, path, "grid_levels", pc.grid_levels);
}

// Shortest text that parses back to the same double.
std::string num(double v) { return fmt::format("{}", v); }

void emit_jitter(YAML::Emitter& out, const netsim::JitterSpec& j)
{
    out << YAML::Key << "jitter" << YAML::Value << YAML::Flow << YAML::BeginMap;
    switch (j.kind) {
    case netsim::JitterSpec::Kind::Constant:
        out << YAML::Key << "kind" << YAML::Value << "constant" << YAML::Key << "value_ms" << YAML::Value
            << num(j.a);
        break;
    case netsim::JitterSpec::Kind::Uniform:
        out << YAML::Key << "kind" << YAML::Value << "uniform" << YAML::Key << "min_ms" << YAML::Value << num(j.a)
            << YAML::Key << "max_ms" << YAML::Value << num(j.b);
        break;
    case netsim::JitterSpec::Kind::Lognormal:
        out << YAML::Key << "kind" << YAML::Value << "lognormal" << YAML::Key << "mu" << YAML::Value << num(j.a)
            << YAML::Key << "sigma" << YAML::Value << num(j.b);
        break;
    }
    out << YAML::EndMap;
}

void emit_terminal(YAML::Emitter& out, const char* name, const TerminalConfig& t)
{
    out << YAML::Key << name << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tx_power_dbm" << YAML::Value << num(t.profile.tx_power_dbm);
    out << YAML::Key << "tx_antenna_gain_dbi" << YAML::Value << num(t.profile.tx_antenna_gain_dbi);
    out << YAML::Key << "rx_antenna_gain_dbi" << YAML::Value << num(t.profile.rx_antenna_gain_dbi);
    out << YAML::Key << "uplink" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "share_factor" << YAML::Value << num(t.ul_share_factor);
    if (t.ul_rate_override_bps) {
        out << YAML::Key << "rate_override_bps" << YAML::Value << num(*t.ul_rate_override_bps);
    }
    out << YAML::Key << "loss_prob" << YAML::Value << num(t.ul_loss_prob);
    out << YAML::Key << "queue_pkts" << YAML::Value << t.ul_queue_pkts;
    emit_jitter(out, t.ul_jitter);
    out << YAML::EndMap << YAML::EndMap;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations))
{
}

const TerminalConfig* ScenarioConfig::terminal(linkbudget::TerminalKind kind) const noexcept
{
    const auto& t = kind == linkbudget::TerminalKind::Smartphone ? smartphone : vsat;
    return t ? &*t : nullptr;
}

const FlowConfig* ScenarioConfig::find_flow(std::string_view flow_id) const noexcept
{
    for (const auto& f : traffic.flows) {
        if (f.id == flow_id) {
            return &f;
        }
    }
    return nullptr;
}

const FlowConfig* ScenarioConfig::find_flow(traffic::Protocol protocol, traffic::Direction direction) const noexcept
{
    for (const auto& f : traffic.flows) {
        if (f.protocol == protocol && f.direction == direction) {
            return &f;
        }
    }
    return nullptr;
}

std::filesystem::path ScenarioConfig::powerctl_instance_path() const
{
    if (!powerctl) {
        return {};
    }
    const std::filesystem::path p(powerctl->instance);
    return p.is_absolute() ? p : base_dir / p;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const
{
    return schema_version == o.schema_version && id == o.id && geometry.elevation_deg == o.geometry.elevation_deg
           && geometry.altitude_m == o.geometry.altitude_m && geometry.earth_radius_m == o.geometry.earth_radius_m
           && link_budget == o.link_budget && smartphone == o.smartphone && vsat == o.vsat && topology == o.topology
           && traffic == o.traffic && run == o.run && powerctl == o.powerctl && seeds == o.seeds
           && output_dir == o.output_dir && active_profile == o.active_profile;
}

std::string_view to_string(DelaySource source) noexcept
{
    switch (source) {
    case DelaySource::Fixed:
        return "delay_s";
    case DelaySource::Distance:
        return "distance_m";
    case DelaySource::SlantRange:
        return "slant_range";
    }
    return "?";
}

std::string_view to_string(RateSource source) noexcept
{
    switch (source) {
    case RateSource::Fixed:
        return "rate_bps";
    case RateSource::Downlink:
        return "downlink";
    case RateSource::Uplink:
        return "uplink";
    }
    return "?";
}

std::vector<std::string> validate(const ScenarioConfig& c)
{
    std::vector<std::string> v;
    auto check = [&v](bool ok, std::string msg) {
        if (!ok) {
            v.push_back(std::move(msg));
        }
    };

    check(c.schema_version == kSchemaVersion,
          fmt::format("'schema_version': unsupported version {} (expected {})", c.schema_version, kSchemaVersion));
    check(!c.id.empty(), "'id': must not be empty");
    try {
        c.geometry.validate();
    } catch (const std::exception& e) {
        v.push_back(fmt::format("'geometry': {}", e.what()));
    }

    const auto& lb = c.link_budget;
    check(lb.freq_isl_ghz > 0 && lb.freq_dl_ghz > 0 && lb.freq_ul_ghz > 0,
          "'link_budget': carrier frequencies must be positive");
    check(lb.bandwidth_dl_hz > 0 && lb.bandwidth_ul_hz > 0, "'link_budget': bandwidths must be positive");
    check(lb.dl_share_factor > 0 && lb.dl_share_factor <= 1, "'link_budget.dl_share_factor': must lie in (0, 1]");
    if (lb.eirp_dbm && std::abs(*lb.eirp_dbm - lb.eirp_dbw - 30.0) > 1e-9) {
        v.push_back(fmt::format("'link_budget.eirp_dbm': {} dBm is inconsistent with eirp_dbw {} dBW (must differ by 30 dB)",
                                num(*lb.eirp_dbm), num(lb.eirp_dbw)));
    }
    try {
        lb.losses.validate();
    } catch (const std::exception& e) {
        v.push_back(fmt::format("'link_budget': {}", e.what()));
    }

    for (const auto kind : {linkbudget::TerminalKind::Smartphone, linkbudget::TerminalKind::Vsat}) {
        const auto* t = c.terminal(kind);
        if (t == nullptr) {
            continue;
        }
        const auto p = fmt::format("terminals.{}.uplink", linkbudget::to_string(kind));
        check(t->ul_share_factor > 0 && t->ul_share_factor <= 1, fmt::format("'{}.share_factor': must lie in (0, 1]", p));
        check(!t->ul_rate_override_bps || *t->ul_rate_override_bps > 0,
              fmt::format("'{}.rate_override_bps': must be positive", p));
        check(t->ul_loss_prob >= 0 && t->ul_loss_prob <= 1, fmt::format("'{}.loss_prob': must lie in [0, 1]", p));
        check(t->ul_queue_pkts >= 1, fmt::format("'{}.queue_pkts': must be at least 1", p));
        try {
            t->ul_jitter.validate();
        } catch (const std::exception& e) {
            v.push_back(fmt::format("'{}.jitter': {}", p, e.what()));
        }
    }
    check(c.terminal(c.active_profile) != nullptr,
          fmt::format("'active_profile': terminal profile '{}' is not defined", linkbudget::to_string(c.active_profile)));

    std::set<std::string> node_ids;
    for (const auto& n : c.topology.nodes) {
        check(!n.id.empty(), "'topology.nodes': node id must not be empty");
        check(node_ids.insert(n.id).second, fmt::format("'topology.nodes': duplicate node id '{}'", n.id));
    }
    check(!c.topology.nodes.empty(), "'topology.nodes': at least one node is required");
    auto known = [&node_ids](const std::string& id) { return node_ids.count(id) > 0; };

    std::set<std::string> link_ids;
    bool uses_uplink = false;
    for (const auto& l : c.topology.links) {
        const auto p = fmt::format("topology.links.{}", l.id);
        check(link_ids.insert(l.id).second, fmt::format("'topology.links': duplicate link id '{}'", l.id));
        check(known(l.from), fmt::format("'{}.from': unknown node '{}'", p, l.from));
        check(known(l.to), fmt::format("'{}.to': unknown node '{}'", p, l.to));
        check(l.from != l.to, fmt::format("'{}': self-loop", p));
        check(l.delay_source != DelaySource::Fixed || l.delay_s >= 0, fmt::format("'{}.delay_s': must be >= 0", p));
        check(l.delay_source != DelaySource::Distance || l.distance_m >= 0,
              fmt::format("'{}.distance_m': must be >= 0", p));
        check(l.rate_source != RateSource::Fixed || l.rate_bps > 0, fmt::format("'{}.rate_bps': must be positive", p));
        check(l.loss_prob >= 0 && l.loss_prob <= 1, fmt::format("'{}.loss_prob': must lie in [0, 1]", p));
        check(l.queue_pkts >= 1, fmt::format("'{}.queue_pkts': must be at least 1", p));
        try {
            l.jitter.validate();
        } catch (const std::exception& e) {
            v.push_back(fmt::format("'{}.jitter': {}", p, e.what()));
        }
        uses_uplink = uses_uplink || l.rate_source == RateSource::Uplink;
    }
    check(!uses_uplink || c.smartphone || c.vsat, "'terminals': uplink-rated links need at least one terminal profile");

    for (std::size_t i = 0; i < c.topology.routes.size(); ++i) {
        const auto& r = c.topology.routes[i];
        check(r.size() >= 2, fmt::format("'topology.routes[{}]': a route needs at least two nodes", i));
        for (const auto& id : r) {
            check(known(id), fmt::format("'topology.routes[{}]': unknown node '{}'", i, id));
        }
    }

    const auto& t = c.traffic;
    check(known(t.terminal), fmt::format("'traffic.terminal': unknown node '{}'", t.terminal));
    check(known(t.server), fmt::format("'traffic.server': unknown node '{}'", t.server));
    if (t.ping) {
        check(known(t.ping->src), fmt::format("'traffic.ping.src': unknown node '{}'", t.ping->src));
        check(known(t.ping->dst), fmt::format("'traffic.ping.dst': unknown node '{}'", t.ping->dst));
        check(t.ping->interval_s > 0, "'traffic.ping.interval_s': must be positive");
        check(t.ping->timeout_s >= 0, "'traffic.ping.timeout_s': must be >= 0");
    }
    check(t.tcp.mss_bytes > 0 && t.tcp.initial_cwnd_segments > 0,
          "'traffic.tcp': mss_bytes and initial_cwnd_segments must be positive");
    check(t.tcp.min_rto_s > 0, "'traffic.tcp.min_rto_s': must be positive");
    std::set<std::string> flow_ids;
    for (const auto& f : t.flows) {
        const auto p = fmt::format("traffic.flows.{}", f.id);
        check(!f.id.empty(), "'traffic.flows': flow id must not be empty");
        check(flow_ids.insert(f.id).second, fmt::format("'traffic.flows': duplicate flow id '{}'", f.id));
        check(f.duration_s >= 0, fmt::format("'{}.duration_s': must be >= 0", p));
        check(f.report_interval_s > 0, fmt::format("'{}.report_interval_s': must be positive", p));
        check(f.protocol != traffic::Protocol::Udp || f.target_rate_bps > 0,
              fmt::format("'{}.target_rate_bps': must be positive", p));
        check(f.datagram_bytes > 0, fmt::format("'{}.datagram_bytes': must be positive", p));
    }

    check(c.run.coverage_window_s > 0, "'run.coverage_window_s': must be positive");
    if (c.powerctl) {
        check(!c.powerctl->instance.empty(), "'powerctl.instance': must not be empty");
        check(c.powerctl->tol > 0, "'powerctl.tol': must be positive");
        check(c.powerctl->max_iter > 0, "'powerctl.max_iter': must be positive");
        check(c.powerctl->grid_levels >= 2, "'powerctl.grid_levels': must be at least 2");
    }
    check(!c.seeds.empty(), "'seeds': at least one seed is required");
    check(!c.output_dir.empty(), "'output_dir': must not be empty");

    // Reachability needs a structurally sound topology.
    if (v.empty()) {
        try {
            for (const auto kind : {linkbudget::TerminalKind::Smartphone, linkbudget::TerminalKind::Vsat}) {
                if (c.terminal(kind) != nullptr || !uses_uplink) {
                    build_topology(c, kind);
                    if (!uses_uplink) {
                        break;
                    }
                }
            }
        } catch (const std::exception& e) {
            v.push_back(fmt::format("'topology': {}", e.what()));
        }
    }
    return v;
}

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ScenarioError({fmt::format("line {}, column {}: {}", e.mark.line + 1, e.mark.column + 1, e.msg)});
    }
    if (!root || root.IsNull()) {
        throw ScenarioError({"'schema_version': missing (empty scenario)"});
    }

    Reader r;
    ScenarioConfig c;
    c.base_dir = base_dir;
    c.smartphone.reset();
    c.vsat.reset();
    if (!r.map(root, "",
               {"schema_version", "id", "geometry", "link_budget", "terminals", "topology", "traffic", "run",
                "powerctl", "seeds", "output_dir", "active_profile"})) {
        throw ScenarioError(r.errors);
    }
    if (!root["schema_version"]) {
        r.error(root, "schema_version", "missing");
    } else {
        r.scalar(root, "", "schema_version", c.schema_version);
    }
    r.scalar(root, "", "id", c.id, true);

    if (const auto n = root["geometry"]) {
        read_geometry(r, n, c.geometry);
    } else {
        r.error(root, "geometry", "missing required block (altitude_m has no default)");
    }
    if (const auto n = root["link_budget"]) {
        read_link_budget(r, n, c.link_budget);
    }
    if (const auto n = root["terminals"]) {
        if (r.map(n, "terminals", {"smartphone", "vsat"})) {
            if (n["smartphone"]) {
                read_terminal(r, n["smartphone"], "terminals.smartphone", linkbudget::TerminalKind::Smartphone,
                              c.smartphone.emplace());
            }
            if (n["vsat"]) {
                read_terminal(r, n["vsat"], "terminals.vsat", linkbudget::TerminalKind::Vsat, c.vsat.emplace());
            }
        }
    } else {
        c.smartphone.emplace().profile = linkbudget::TerminalProfile::reference_smartphone();
        c.vsat.emplace().profile = linkbudget::TerminalProfile::reference_vsat();
    }
    if (const auto n = root["topology"]) {
        read_topology(r, n, c.topology);
    } else {
        r.error(root, "topology", "missing required block");
    }
    if (const auto n = root["traffic"]) {
        read_traffic(r, n, c.traffic);
    } else {
        r.error(root, "traffic", "missing required block");
    }
    if (const auto n = root["run"]) {
        if (r.map(n, "run", {"coverage_window_s", "handover_model"})) {
            r.scalar(n, "run", "coverage_window_s", c.run.coverage_window_s);
            std::string model;
            if (r.scalar(n, "run", "handover_model", model)) {
                if (model == "none") {
                    c.run.handover_model = false;
                } else if (model == "ideal") {
                    c.run.handover_model = true;
                } else {
                    r.error(n["handover_model"], "run.handover_model", "expected 'none' or 'ideal'");
                }
            }
        }
    }
    if (const auto n = root["powerctl"]) {
        read_powerctl(r, n, c.powerctl.emplace());
    }
    if (const auto n = root["seeds"]) {
        try {
            c.seeds = n.as<std::vector<std::uint64_t>>();
        } catch (const YAML::Exception&) {
            r.error(n, "seeds", "expected a list of unsigned integers");
        }
    }
    r.scalar(root, "", "output_dir", c.output_dir);
    std::string profile;
    if (r.scalar(root, "", "active_profile", profile)) {
        if (const auto k = linkbudget::parse_terminal_kind(profile)) {
            c.active_profile = *k;
        } else {
            r.error(root["active_profile"], "active_profile", "expected 'smartphone' or 'vsat'");
        }
    }

    if (!r.errors.empty()) {
        throw ScenarioError(r.errors);
    }
    auto problems = validate(c);
    if (!problems.empty()) {
        throw ScenarioError(std::move(problems));
    }
    for (const auto& f : c.traffic.flows) {
        if (f.duration_s > 0) {
            if (auto w = netsim::validate_run_duration(f.duration_s, c.run.coverage_window_s, c.run.handover_model)) {
                c.warnings.push_back(fmt::format("flow '{}': {}", f.id, *w));
            }
        }
    }
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError({fmt::format("cannot read scenario file '{}'", path.string())});
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path());
}

std::string serialize_scenario(const ScenarioConfig& c)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << c.schema_version;
    out << YAML::Key << "id" << YAML::Value << c.id;

    out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "elevation_deg" << YAML::Value << num(c.geometry.elevation_deg);
    out << YAML::Key << "altitude_m" << YAML::Value << num(c.geometry.altitude_m);
    out << YAML::Key << "earth_radius_m" << YAML::Value << num(c.geometry.earth_radius_m);
    out << YAML::EndMap;

    const auto& lb = c.link_budget;
    out << YAML::Key << "link_budget" << YAML::Value << YAML::BeginMap;
    auto kv = [&out](const char* k, double v) { out << YAML::Key << k << YAML::Value << num(v); };
    kv("freq_isl_ghz", lb.freq_isl_ghz);
    kv("freq_dl_ghz", lb.freq_dl_ghz);
    kv("freq_ul_ghz", lb.freq_ul_ghz);
    kv("bandwidth_dl_hz", lb.bandwidth_dl_hz);
    kv("bandwidth_ul_hz", lb.bandwidth_ul_hz);
    kv("eirp_dbw", lb.eirp_dbw);
    if (lb.eirp_dbm) {
        kv("eirp_dbm", *lb.eirp_dbm);
    }
    kv("merit_figure_db_per_k", lb.merit_figure_db_per_k);
    kv("gnb_tx_power_dbm", lb.gnb_tx_power_dbm);
    kv("gs_rx_antenna_gain_dbi", lb.gs_rx_antenna_gain_dbi);
    kv("gs_tx_antenna_gain_dbi", lb.gs_tx_antenna_gain_dbi);
    kv("entry_loss_db", lb.losses.entry_db);
    kv("atm_loss_db", lb.losses.atm_db);
    kv("scint_loss_db", lb.losses.scint_db);
    kv("shadow_loss_db", lb.losses.shadow_db);
    kv("polarization_loss_db", lb.losses.polarization_db);
    kv("misalignment_loss_db", lb.losses.misalignment_db);
    kv("dl_share_factor", lb.dl_share_factor);
    out << YAML::EndMap;

    out << YAML::Key << "terminals" << YAML::Value << YAML::BeginMap;
    if (c.smartphone) {
        emit_terminal(out, "smartphone", *c.smartphone);
    }
    if (c.vsat) {
        emit_terminal(out, "vsat", *c.vsat);
    }
    out << YAML::EndMap;

    out << YAML::Key << "topology" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "nodes" << YAML::Value << YAML::BeginSeq;
    for (const auto& n : c.topology.nodes) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << n.id << YAML::Key << "kind"
            << YAML::Value << std::string(netsim::to_string(n.kind)) << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : c.topology.links) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << l.id;
        out << YAML::Key << "from" << YAML::Value << l.from;
        out << YAML::Key << "to" << YAML::Value << l.to;
        switch (l.delay_source) {
        case DelaySource::Fixed:
            kv("delay_s", l.delay_s);
            break;
        case DelaySource::Distance:
            kv("distance_m", l.distance_m);
            break;
        case DelaySource::SlantRange:
            out << YAML::Key << "propagation" << YAML::Value << "slant_range";
            break;
        }
        if (l.rate_source == RateSource::Fixed) {
            kv("rate_bps", l.rate_bps);
        } else {
            out << YAML::Key << "rate_from" << YAML::Value << std::string(to_string(l.rate_source));
        }
        emit_jitter(out, l.jitter);
        kv("loss_prob", l.loss_prob);
        out << YAML::Key << "queue_pkts" << YAML::Value << l.queue_pkts;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "routes" << YAML::Value << YAML::BeginSeq;
    for (const auto& r : c.topology.routes) {
        out << YAML::Flow << r;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;

    const auto& t = c.traffic;
    out << YAML::Key << "traffic" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "terminal" << YAML::Value << t.terminal;
    out << YAML::Key << "server" << YAML::Value << t.server;
    if (t.ping) {
        out << YAML::Key << "ping" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "src" << YAML::Value << t.ping->src;
        out << YAML::Key << "dst" << YAML::Value << t.ping->dst;
        out << YAML::Key << "count" << YAML::Value << t.ping->count;
        kv("interval_s", t.ping->interval_s);
        out << YAML::Key << "payload_bytes" << YAML::Value << t.ping->payload_bytes;
        kv("timeout_s", t.ping->timeout_s);
        out << YAML::EndMap;
    }
    out << YAML::Key << "tcp" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "mss_bytes" << YAML::Value << t.tcp.mss_bytes;
    out << YAML::Key << "initial_cwnd_segments" << YAML::Value << t.tcp.initial_cwnd_segments;
    out << YAML::Key << "receive_window_bytes" << YAML::Value << t.tcp.receive_window_bytes;
    kv("min_rto_s", t.tcp.min_rto_s);
    out << YAML::EndMap;
    out << YAML::Key << "flows" << YAML::Value << YAML::BeginSeq;
    for (const auto& f : t.flows) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << f.id;
        out << YAML::Key << "protocol" << YAML::Value << std::string(traffic::to_string(f.protocol));
        out << YAML::Key << "direction" << YAML::Value << std::string(traffic::to_string(f.direction));
        kv("duration_s", f.duration_s);
        kv("report_interval_s", f.report_interval_s);
        if (f.protocol == traffic::Protocol::Udp) {
            kv("target_rate_bps", f.target_rate_bps);
            out << YAML::Key << "datagram_bytes" << YAML::Value << f.datagram_bytes;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    kv("coverage_window_s", c.run.coverage_window_s);
    out << YAML::Key << "handover_model" << YAML::Value << (c.run.handover_model ? "ideal" : "none");
    out << YAML::EndMap;

    if (c.powerctl) {
        out << YAML::Key << "powerctl" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "instance" << YAML::Value << c.powerctl->instance;
        out << YAML::Key << "interference_mode" << YAML::Value << std::string(powerctl::to_string(c.powerctl->mode));
        kv("tol", c.powerctl->tol);
        out << YAML::Key << "max_iter" << YAML::Value << c.powerctl->max_iter;
        out << YAML::Key << "grid_levels" << YAML::Value << c.powerctl->grid_levels;
        out << YAML::EndMap;
    }
    out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
    out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
    out << YAML::Key << "active_profile" << YAML::Value << std::string(linkbudget::to_string(c.active_profile));
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace ntn::scenario
