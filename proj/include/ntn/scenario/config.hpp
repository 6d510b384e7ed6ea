#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ntn/geometry.hpp"
#include "ntn/linkbudget.hpp"
#include "ntn/netsim/graph.hpp"
#include "ntn/powerctl/instance.hpp"
#include "ntn/traffic/report.hpp"

namespace ntn::scenario {

inline constexpr int kSchemaVersion = 1;

/// Parse or validation failure. what() lists every violation, one per line.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Parameter-table block. Every field defaults to the bundled Key West values.
struct LinkBudgetBlock {
    double freq_isl_ghz = 37.0;
    double freq_dl_ghz = 12.7;
    double freq_ul_ghz = 14.5;
    double bandwidth_dl_hz = 240e6;
    double bandwidth_ul_hz = 60e6;
    double eirp_dbw = 50.9;
    std::optional<double> eirp_dbm = 80.9;
    double merit_figure_db_per_k = 9.2;
    double gnb_tx_power_dbm = 36.0;
    double gs_rx_antenna_gain_dbi = 33.2;
    double gs_tx_antenna_gain_dbi = 34.6;
    // fspl_db is ignored here; each hop computes its own from geometry.
    linkbudget::PathLossBreakdown losses{0.0, 0.0, 0.0, 0.0, 2.6, 3.0, 0.5};
    double dl_share_factor = 1.0;

    bool operator==(const LinkBudgetBlock&) const = default;
};

/// Uplink behaviour of one terminal type, applied to links with rate_from: uplink.
struct TerminalConfig {
    linkbudget::TerminalProfile profile;
    double ul_share_factor = 1.0;
    std::optional<double> ul_rate_override_bps;
    double ul_loss_prob = 0.0;
    netsim::JitterSpec ul_jitter;
    std::uint32_t ul_queue_pkts = 100;

    bool operator==(const TerminalConfig&) const = default;
};

struct NodeConfig {
    std::string id;
    netsim::NodeKind kind = netsim::NodeKind::CoreHost;
    bool operator==(const NodeConfig&) const = default;
};

enum class DelaySource { Fixed, Distance, SlantRange };
enum class RateSource { Fixed, Downlink, Uplink };

struct LinkConfig {
    std::string id;
    std::string from;
    std::string to;
    DelaySource delay_source = DelaySource::Fixed;
    double delay_s = 0.0;     // DelaySource::Fixed
    double distance_m = 0.0;  // DelaySource::Distance
    RateSource rate_source = RateSource::Fixed;
    double rate_bps = 1e9;    // RateSource::Fixed
    netsim::JitterSpec jitter;
    double loss_prob = 0.0;
    std::uint32_t queue_pkts = 100;

    bool operator==(const LinkConfig&) const = default;
};

struct TopologyConfig {
    std::vector<NodeConfig> nodes;
    std::vector<LinkConfig> links;
    std::vector<std::vector<std::string>> routes;
    bool operator==(const TopologyConfig&) const = default;
};

struct PingConfig {
    std::string src;
    std::string dst;
    std::uint32_t count = 10;
    double interval_s = 1.0;
    std::uint32_t payload_bytes = 64;
    double timeout_s = 5.0;
    bool operator==(const PingConfig&) const = default;
};

struct TcpConfig {
    std::uint32_t mss_bytes = 1448;
    std::uint32_t initial_cwnd_segments = 10;
    std::uint64_t receive_window_bytes = 1u << 20;
    double min_rto_s = 0.2;
    bool operator==(const TcpConfig&) const = default;
};

struct FlowConfig {
    std::string id;
    traffic::Protocol protocol = traffic::Protocol::Tcp;
    traffic::Direction direction = traffic::Direction::Downlink;
    double duration_s = 10.0;
    double report_interval_s = 1.0;
    double target_rate_bps = 0.0;  // UDP only
    std::uint32_t datagram_bytes = 1448;
    bool operator==(const FlowConfig&) const = default;
};

struct TrafficConfig {
    // Downlink flows run server -> terminal, uplink flows the reverse.
    std::string terminal;
    std::string server;
    std::optional<PingConfig> ping;
    TcpConfig tcp;
    std::vector<FlowConfig> flows;
    bool operator==(const TrafficConfig&) const = default;
};

struct RunConfig {
    double coverage_window_s = 7.0;
    bool handover_model = false;
    bool operator==(const RunConfig&) const = default;
};

struct PowerControlConfig {
    std::string instance;  // path, relative to the scenario file
    powerctl::InterferenceMode mode = powerctl::InterferenceMode::CrossGain;
    double tol = 1e-6;
    std::uint32_t max_iter = 1000;
    std::uint32_t grid_levels = 32;
    bool operator==(const PowerControlConfig&) const = default;
};

struct ScenarioConfig {
    int schema_version = kSchemaVersion;
    std::string id;
    geometry::OrbitGeometry geometry;
    LinkBudgetBlock link_budget;
    std::optional<TerminalConfig> smartphone;
    std::optional<TerminalConfig> vsat;
    TopologyConfig topology;
    TrafficConfig traffic;
    RunConfig run;
    std::optional<PowerControlConfig> powerctl;
    std::vector<std::uint64_t> seeds{1};
    std::string output_dir = "out";
    linkbudget::TerminalKind active_profile = linkbudget::TerminalKind::Smartphone;

    // Directory the scenario was loaded from; not serialized.
    std::filesystem::path base_dir;
    // Non-fatal findings collected while loading; not serialized.
    std::vector<std::string> warnings;

    const TerminalConfig* terminal(linkbudget::TerminalKind kind) const noexcept;
    const FlowConfig* find_flow(std::string_view id) const noexcept;
    const FlowConfig* find_flow(traffic::Protocol protocol, traffic::Direction direction) const noexcept;
    std::filesystem::path powerctl_instance_path() const;

    /// Semantic equality; ignores base_dir and warnings.
    bool operator==(const ScenarioConfig& other) const;
};

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioConfig& config);

/// Cross-field checks; returns every violation found.
std::vector<std::string> validate(const ScenarioConfig& config);

std::string_view to_string(DelaySource source) noexcept;
std::string_view to_string(RateSource source) noexcept;

}  // namespace ntn::scenario
