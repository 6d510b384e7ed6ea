#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ntn/scenario/config.hpp"
#include "ntn/scenario/experiment.hpp"
#include "ntn/scenario/topology.hpp"

namespace ntn::scenario {

using Json = nlohmann::ordered_json;

enum class OutputFormat { Csv, Json, Both };
std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept;

struct ReportContext {
    std::string scenario_id;
    std::uint64_t seed = 0;
    linkbudget::TerminalKind profile = linkbudget::TerminalKind::Smartphone;
};

struct FlowRun {
    FlowConfig flow;
    traffic::FlowReport report;
};

/// Everything one `scenario run` produced for one seed. wall_clock_s is
/// reported on the console only so that the files stay byte-identical.
struct RunReport {
    ReportContext context;
    std::optional<traffic::PingSummary> ping;
    std::vector<FlowRun> flows;
    std::vector<HopBudget> link_budgets;
    std::optional<PowerControlRun> powerctl;
    double wall_clock_s = 0.0;
};

// Fixed column orders; '.' decimals; no locale dependence.
std::string ping_csv(const traffic::PingSummary& summary);
std::string flow_csv(const FlowConfig& flow, const traffic::FlowReport& report);
std::string linkbudget_csv(const std::vector<HopBudget>& hops);
std::string ping_sweep_csv(const PingSweep& sweep);
std::string flow_sweep_csv(const FlowSweep& sweep);
std::string allocation_csv(const powerctl::PowerControlInstance& inst, const powerctl::PowerAllocation& z);
std::string objective_trace_csv(const powerctl::SolveReport& report);

Json ping_json(const ReportContext& ctx, const PingConfig& ping, const traffic::PingSummary& summary);
Json flow_json(const ReportContext& ctx, const FlowConfig& flow, const traffic::FlowReport& report);
Json hop_budget_json(const HopBudget& hop);
Json linkbudget_json(const std::string& scenario_id, const std::vector<HopBudget>& hops);
Json ping_sweep_json(const std::string& scenario_id, linkbudget::TerminalKind profile, const PingSweep& sweep);
Json flow_sweep_json(const std::string& scenario_id, linkbudget::TerminalKind profile, const FlowConfig& flow,
                     const FlowSweep& sweep);
Json compare_json(const std::string& scenario_id, std::uint64_t seed, const FlowConfig& flow,
                  const std::vector<traffic::TerminalRun>& runs);
Json powerctl_solve_json(const PowerControlRun& run, powerctl::InterferenceMode mode);
Json powerctl_oracle_json(const PowerControlRun& run, std::size_t grid_levels, powerctl::InterferenceMode mode);
Json run_report_json(const RunReport& report);

/// Every hop budget the scenario can derive: downlink plus one uplink per
/// defined terminal profile.
std::vector<HopBudget> all_link_budgets(const ScenarioConfig& config);

/// Writes report files under one directory and remembers what it wrote.
class ReportWriter {
public:
    ReportWriter(std::filesystem::path dir, OutputFormat format);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    OutputFormat format() const noexcept { return format_; }
    bool wants_csv() const noexcept { return format_ != OutputFormat::Json; }
    bool wants_json() const noexcept { return format_ != OutputFormat::Csv; }
    const std::vector<std::filesystem::path>& written() const noexcept { return written_; }

    /// Writes `<stem>.csv` and/or `<stem>.json` according to the format.
    void write(const std::string& stem, const std::string& csv, const Json& json);
    void write_text(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const Json& json);

private:
    std::filesystem::path dir_;
    OutputFormat format_;
    std::vector<std::filesystem::path> written_;
};

std::string ping_stem(const ReportContext& ctx);
std::string flow_stem(const ReportContext& ctx, const FlowConfig& flow);

/// Human-readable table rebuilt from report files alone. JSON files are
/// preferred; a CSV is read only when no JSON with the same stem exists.
std::string console_summary(const std::vector<std::filesystem::path>& files);

}  // namespace ntn::scenario
