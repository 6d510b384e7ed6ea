#include "ntn/scenario/report.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "ntn/powerctl/instance_io.hpp"

namespace ntn::scenario {

namespace fs = std::filesystem;

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string profile_name(linkbudget::TerminalKind k) { return std::string(linkbudget::to_string(k)); }

Json header(const char* kind, const std::string& scenario_id)
{
    Json j;
    j["kind"] = kind;
    j["scenario"] = scenario_id;
    return j;
}

Json summary_fields(const traffic::PingSummary& s)
{
    Json j;
    j["transmitted"] = s.transmitted;
    j["received"] = s.received;
    j["loss_pct"] = s.loss_pct;
    j["min_ms"] = opt(s.min_ms);
    j["max_ms"] = opt(s.max_ms);
    j["mean_ms"] = opt(s.mean_ms);
    j["std_ms"] = opt(s.std_ms);
    return j;
}

Json flow_totals(const traffic::FlowReport& r)
{
    Json j;
    j["total_bytes"] = r.total_bytes;
    j["delivered_bytes"] = r.delivered_bytes;
    j["sent_packets"] = r.sent_packets;
    j["delivered_packets"] = r.delivered_packets;
    j["lost_packets"] = r.lost_packets;
    j["retransmits"] = r.retransmits;
    j["timeouts"] = r.timeouts;
    const bool any = !r.intervals.empty();
    j["peak_mbps"] = any ? Json(r.peak_mbps()) : Json(nullptr);
    j["min_mbps"] = any ? Json(r.min_mbps()) : Json(nullptr);
    j["mean_mbps"] = any ? Json(r.mean_mbps()) : Json(nullptr);
    return j;
}

Json intervals_json(const traffic::FlowReport& r)
{
    Json a = Json::array();
    for (const auto& iv : r.intervals) {
        Json e;
        e["start_s"] = iv.interval_start_s;
        e["end_s"] = iv.interval_end_s;
        e["bytes"] = iv.bytes;
        e["mbps"] = iv.throughput_mbps;
        e["losses"] = iv.retransmits_or_losses;
        a.push_back(std::move(e));
    }
    return a;
}

Json flow_body(const FlowConfig& f, const traffic::FlowReport& r)
{
    Json j;
    j["flow_id"] = f.id;
    j["protocol"] = std::string(traffic::to_string(f.protocol));
    j["direction"] = std::string(traffic::to_string(f.direction));
    j["duration_s"] = f.duration_s;
    j["report_interval_s"] = f.report_interval_s;
    if (f.protocol == traffic::Protocol::Udp) {
        j["target_rate_bps"] = f.target_rate_bps;
    }
    j.update(flow_totals(r));
    j["intervals"] = intervals_json(r);
    return j;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string fmt_opt(const Json& v, const char* spec = "{:.2f}")
{
    if (v.is_null()) {
        return "-";
    }
    return fmt::format(fmt::runtime(spec), v.get<double>());
}

std::string summarize_json(const fs::path& path, const Json& j)
{
    const auto kind = j.value("kind", std::string());
    const auto name = path.filename().string();
    if (kind == "ping") {
        return fmt::format("{:<40} ping {}->{} seed {}  rtt min/mean/max/std {}/{}/{}/{} ms  loss {:.1f}%\n", name,
                           j["src"].get<std::string>(), j["dst"].get<std::string>(), j["seed"].get<std::uint64_t>(),
                           fmt_opt(j["min_ms"]), fmt_opt(j["mean_ms"]), fmt_opt(j["max_ms"]), fmt_opt(j["std_ms"]),
                           j["loss_pct"].get<double>());
    }
    if (kind == "flow") {
        return fmt::format("{:<40} {} {} {} seed {}  Mbps peak/mean/min {}/{}/{}  intervals {}\n", name,
                           j["flow_id"].get<std::string>(), j["protocol"].get<std::string>(),
                           j["direction"].get<std::string>(), j["seed"].get<std::uint64_t>(),
                           fmt_opt(j["peak_mbps"]), fmt_opt(j["mean_mbps"]), fmt_opt(j["min_mbps"]),
                           j["intervals"].size());
    }
    if (kind == "linkbudget") {
        std::string out = fmt::format("{:<40} link budget\n", name);
        for (const auto& h : j["hops"]) {
            out += fmt::format("    {:<18} FSPL {:.2f} dB  L {:.2f} dB  C/N0 {:.2f} dB-Hz  SNR {:.2f} dB  "
                               "C {:.4g} bps  rate {:.4g} bps\n",
                               h["name"].get<std::string>(), h["fspl_db"].get<double>(),
                               h["path_loss_db"].get<double>(), h["cn0_db_hz"].get<double>(),
                               h["snr_db"].get<double>(), h["capacity_bps"].get<double>(),
                               h["link_rate_bps"].get<double>());
        }
        return out;
    }
    if (kind == "powerctl_solve" || kind == "powerctl_oracle") {
        return fmt::format("{:<40} {} objective {:.6f} bits/s/Hz ({})\n", name, j["solver"].get<std::string>(),
                           j["objective"].get<double>(), j["interference_mode"].get<std::string>());
    }
    if (kind == "ping_sweep") {
        const auto& a = j["aggregate"];
        return fmt::format("{:<40} ping sweep runs {} failed {}  mean of means {} ms  mean of std {} ms  "
                           "pooled min/max {}/{} ms\n",
                           name, a["runs"].get<std::size_t>(), a["failures"].get<std::size_t>(),
                           fmt_opt(a["mean_of_means_ms"]), fmt_opt(a["mean_of_std_ms"]),
                           fmt_opt(a["pooled_min_ms"]), fmt_opt(a["pooled_max_ms"]));
    }
    if (kind == "flow_sweep") {
        const auto& a = j["aggregate"];
        return fmt::format("{:<40} {} sweep runs {} failed {}  mean peak {} Mbps  pooled min/max {}/{} Mbps\n",
                           name, j["flow_id"].get<std::string>(), a["runs"].get<std::size_t>(),
                           a["failures"].get<std::size_t>(), fmt_opt(a["mean_peak_mbps"]),
                           fmt_opt(a["pooled_min_mbps"]), fmt_opt(a["pooled_max_mbps"]));
    }
    if (kind == "compare") {
        std::string out = fmt::format("{:<40} {} compare seed {}\n", name, j["flow_id"].get<std::string>(),
                                      j["seed"].get<std::uint64_t>());
        for (const auto& r : j["runs"]) {
            out += fmt::format("    {:<12} Mbps peak/mean/min {}/{}/{}\n", r["profile"].get<std::string>(),
                               fmt_opt(r["peak_mbps"]), fmt_opt(r["mean_mbps"]), fmt_opt(r["min_mbps"]));
        }
        return out;
    }
    if (kind == "run_report") {
        return fmt::format("{:<40} run report seed {} ({} flows)\n", name, j["seed"].get<std::uint64_t>(),
                           j["flows"].size());
    }
    return fmt::format("{:<40} {}\n", name, kind.empty() ? "json" : kind);
}

std::string summarize_csv(const fs::path& path)
{
    const auto rows = read_csv(path);
    const auto name = path.filename().string();
    if (rows.empty()) {
        return fmt::format("{:<40} empty\n", name);
    }
    const auto& head = rows.front();
    if (head == std::vector<std::string>{"seq", "rtt_ms", "lost"}) {
        std::vector<traffic::PingSample> samples;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            traffic::PingSample s;
            s.seq = static_cast<std::uint32_t>(std::stoul(rows[i].at(0)));
            if (rows[i].at(2) == "0") {
                s.rtt_ms = std::stod(rows[i].at(1));
            }
            samples.push_back(s);
        }
        const auto s = traffic::summarize_ping(std::move(samples));
        return fmt::format("{:<40} ping rtt min/mean/max/std {}/{}/{}/{} ms  loss {:.1f}%\n", name,
                           fmt_opt(opt(s.min_ms)), fmt_opt(opt(s.mean_ms)), fmt_opt(opt(s.max_ms)),
                           fmt_opt(opt(s.std_ms)), s.loss_pct);
    }
    if (!head.empty() && head.front() == "flow_id") {
        double peak = 0.0;
        double sum = 0.0;
        double lo = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const double v = std::stod(rows[i].at(5));
            peak = n == 0 ? v : std::max(peak, v);
            lo = n == 0 ? v : std::min(lo, v);
            sum += v;
            ++n;
        }
        if (n == 0) {
            return fmt::format("{:<40} flow with no intervals\n", name);
        }
        return fmt::format("{:<40} {} {} {}  Mbps peak/mean/min {:.2f}/{:.2f}/{:.2f}  intervals {}\n", name,
                           rows[1].at(0), rows[1].at(1), rows[1].at(2), peak, sum / static_cast<double>(n), lo, n);
    }
    return fmt::format("{:<40} {} rows\n", name, rows.size() - 1);
}

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view name) noexcept
{
    if (name == "csv") {
        return OutputFormat::Csv;
    }
    if (name == "json") {
        return OutputFormat::Json;
    }
    if (name == "both") {
        return OutputFormat::Both;
    }
    return std::nullopt;
}

std::string ping_csv(const traffic::PingSummary& s)
{
    std::string out = "seq,rtt_ms,lost\n";
    for (const auto& p : s.samples) {
        if (p.rtt_ms) {
            out += fmt::format("{},{:.6f},0\n", p.seq, *p.rtt_ms);
        } else {
            out += fmt::format("{},,1\n", p.seq);
        }
    }
    return out;
}

std::string flow_csv(const FlowConfig& f, const traffic::FlowReport& r)
{
    std::string out = "flow_id,protocol,direction,interval_start_s,interval_end_s,mbps,losses\n";
    for (const auto& iv : r.intervals) {
        out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{}\n", f.id, traffic::to_string(f.protocol),
                           traffic::to_string(f.direction), iv.interval_start_s, iv.interval_end_s,
                           iv.throughput_mbps, iv.retransmits_or_losses);
    }
    return out;
}

std::string linkbudget_csv(const std::vector<HopBudget>& hops)
{
    std::string out = "hop,freq_ghz,bandwidth_hz,distance_m,fspl_db,path_loss_db,eirp_dbw,merit_db_per_k,"
                      "cn0_db_hz,snr_db,capacity_bps,share_factor,link_rate_bps\n";
    for (const auto& h : hops) {
        out += fmt::format("{},{},{},{:.3f},{:.6f},{:.6f},{},{},{:.6f},{:.6f},{:.3f},{},{:.3f}\n", h.name,
                           h.params.carrier_freq_ghz, h.params.bandwidth_hz, h.distance_m, h.params.losses.fspl_db,
                           h.result.path_loss_db, h.params.eirp_dbw, h.params.figure_of_merit_db_per_k,
                           h.result.cn0_db_hz, h.result.snr_db, h.result.capacity_bps, h.share_factor,
                           h.link_rate_bps());
    }
    return out;
}

std::string ping_sweep_csv(const PingSweep& sweep)
{
    std::string out = "seed,transmitted,received,min_ms,max_ms,mean_ms,std_ms,loss_pct,error\n";
    auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.6f}", *v) : std::string(); };
    for (const auto& r : sweep.rows) {
        if (!r.summary) {
            out += fmt::format("{},,,,,,,,\"{}\"\n", r.seed, r.error);
            continue;
        }
        const auto& s = *r.summary;
        out += fmt::format("{},{},{},{},{},{},{},{:.3f},\n", r.seed, s.transmitted, s.received, cell(s.min_ms),
                           cell(s.max_ms), cell(s.mean_ms), cell(s.std_ms), s.loss_pct);
    }
    return out;
}

std::string flow_sweep_csv(const FlowSweep& sweep)
{
    std::string out = "seed,intervals,peak_mbps,mean_mbps,min_mbps,total_bytes,retransmits,lost_packets,error\n";
    for (const auto& r : sweep.rows) {
        if (!r.report) {
            out += fmt::format("{},,,,,,,,\"{}\"\n", r.seed, r.error);
            continue;
        }
        const auto& f = *r.report;
        out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{},{},{},\n", r.seed, f.intervals.size(), f.peak_mbps(),
                           f.mean_mbps(), f.min_mbps(), f.total_bytes, f.retransmits, f.lost_packets);
    }
    return out;
}

std::string allocation_csv(const powerctl::PowerControlInstance& inst, const powerctl::PowerAllocation& z)
{
    std::string out = "user,station,rbg,power_w\n";
    for (const auto& t : inst.triples()) {
        out += fmt::format("{},{},{},{:.12f}\n", t.user, t.station, t.rbg, z.at(inst, t.user, t.station, t.rbg));
    }
    return out;
}

std::string objective_trace_csv(const powerctl::SolveReport& report)
{
    std::ostringstream out;
    powerctl::write_trace_csv(out, report);
    return out.str();
}

Json ping_json(const ReportContext& ctx, const PingConfig& ping, const traffic::PingSummary& s)
{
    auto j = header("ping", ctx.scenario_id);
    j["seed"] = ctx.seed;
    j["profile"] = profile_name(ctx.profile);
    j["src"] = ping.src;
    j["dst"] = ping.dst;
    j.update(summary_fields(s));
    Json samples = Json::array();
    for (const auto& p : s.samples) {
        Json e;
        e["seq"] = p.seq;
        e["rtt_ms"] = opt(p.rtt_ms);
        samples.push_back(std::move(e));
    }
    j["samples"] = std::move(samples);
    return j;
}

Json flow_json(const ReportContext& ctx, const FlowConfig& f, const traffic::FlowReport& r)
{
    auto j = header("flow", ctx.scenario_id);
    j["seed"] = ctx.seed;
    j["profile"] = profile_name(ctx.profile);
    j.update(flow_body(f, r));
    return j;
}

Json hop_budget_json(const HopBudget& h)
{
    Json j;
    j["name"] = h.name;
    j["freq_ghz"] = h.params.carrier_freq_ghz;
    j["bandwidth_hz"] = h.params.bandwidth_hz;
    j["distance_m"] = h.distance_m;
    j["eirp_dbw"] = h.params.eirp_dbw;
    j["merit_figure_db_per_k"] = h.params.figure_of_merit_db_per_k;
    const auto& l = h.params.losses;
    j["fspl_db"] = l.fspl_db;
    j["entry_loss_db"] = l.entry_db;
    j["atm_loss_db"] = l.atm_db;
    j["scint_loss_db"] = l.scint_db;
    j["shadow_loss_db"] = l.shadow_db;
    j["polarization_loss_db"] = l.polarization_db;
    j["misalignment_loss_db"] = l.misalignment_db;
    j["path_loss_db"] = h.result.path_loss_db;
    j["cn0_db_hz"] = h.result.cn0_db_hz;
    j["snr_db"] = h.result.snr_db;
    j["capacity_bps"] = h.result.capacity_bps;
    j["share_factor"] = h.share_factor;
    j["effective_rate_bps"] = h.effective_rate_bps;
    j["rate_override_bps"] = opt(h.rate_override_bps);
    j["link_rate_bps"] = h.link_rate_bps();
    return j;
}

Json linkbudget_json(const std::string& scenario_id, const std::vector<HopBudget>& hops)
{
    auto j = header("linkbudget", scenario_id);
    Json a = Json::array();
    for (const auto& h : hops) {
        a.push_back(hop_budget_json(h));
    }
    j["hops"] = std::move(a);
    return j;
}

Json ping_sweep_json(const std::string& scenario_id, linkbudget::TerminalKind profile, const PingSweep& sweep)
{
    auto j = header("ping_sweep", scenario_id);
    j["profile"] = profile_name(profile);
    Json rows = Json::array();
    for (const auto& r : sweep.rows) {
        Json e;
        e["seed"] = r.seed;
        if (r.summary) {
            e.update(summary_fields(*r.summary));
        } else {
            e["error"] = r.error;
        }
        rows.push_back(std::move(e));
    }
    const auto& a = sweep.aggregate;
    Json agg;
    agg["runs"] = a.runs;
    agg["failures"] = a.failures;
    agg["probes"] = a.probes;
    agg["lost"] = a.lost;
    agg["mean_of_means_ms"] = opt(a.mean_of_means_ms);
    agg["mean_of_std_ms"] = opt(a.mean_of_std_ms);
    agg["pooled_min_ms"] = opt(a.pooled_min_ms);
    agg["pooled_max_ms"] = opt(a.pooled_max_ms);
    j["aggregate"] = std::move(agg);
    j["runs"] = std::move(rows);
    return j;
}

Json flow_sweep_json(const std::string& scenario_id, linkbudget::TerminalKind profile, const FlowConfig& flow,
                     const FlowSweep& sweep)
{
    auto j = header("flow_sweep", scenario_id);
    j["profile"] = profile_name(profile);
    j["flow_id"] = flow.id;
    j["protocol"] = std::string(traffic::to_string(flow.protocol));
    j["direction"] = std::string(traffic::to_string(flow.direction));
    const auto& a = sweep.aggregate;
    Json agg;
    agg["runs"] = a.runs;
    agg["failures"] = a.failures;
    agg["mean_peak_mbps"] = opt(a.mean_peak_mbps);
    agg["mean_mbps"] = opt(a.mean_mbps);
    agg["pooled_min_mbps"] = opt(a.pooled_min_mbps);
    agg["pooled_max_mbps"] = opt(a.pooled_max_mbps);
    j["aggregate"] = std::move(agg);
    Json rows = Json::array();
    for (const auto& r : sweep.rows) {
        Json e;
        e["seed"] = r.seed;
        if (r.report) {
            e.update(flow_totals(*r.report));
        } else {
            e["error"] = r.error;
        }
        rows.push_back(std::move(e));
    }
    j["runs"] = std::move(rows);
    return j;
}

Json compare_json(const std::string& scenario_id, std::uint64_t seed, const FlowConfig& flow,
                  const std::vector<traffic::TerminalRun>& runs)
{
    auto j = header("compare", scenario_id);
    j["seed"] = seed;
    j["flow_id"] = flow.id;
    j["protocol"] = std::string(traffic::to_string(flow.protocol));
    j["direction"] = std::string(traffic::to_string(flow.direction));
    Json a = Json::array();
    for (const auto& r : runs) {
        Json e;
        e["profile"] = profile_name(r.kind);
        e.update(flow_totals(r.report));
        e["intervals"] = intervals_json(r.report);
        a.push_back(std::move(e));
    }
    j["runs"] = std::move(a);
    return j;
}

Json powerctl_solve_json(const PowerControlRun& run, powerctl::InterferenceMode mode)
{
    Json j;
    j["kind"] = "powerctl_solve";
    j.update(powerctl::solve_report_to_json(run.instance, run.solve, mode));
    return j;
}

Json powerctl_oracle_json(const PowerControlRun& run, std::size_t grid_levels, powerctl::InterferenceMode mode)
{
    Json j;
    j["kind"] = "powerctl_oracle";
    j.update(powerctl::oracle_result_to_json(run.instance, *run.oracle, grid_levels, mode));
    return j;
}

Json run_report_json(const RunReport& r)
{
    auto j = header("run_report", r.context.scenario_id);
    j["seed"] = r.context.seed;
    j["profile"] = profile_name(r.context.profile);
    if (r.ping) {
        j["ping"] = summary_fields(*r.ping);
    } else {
        j["ping"] = nullptr;
    }
    Json flows = Json::array();
    for (const auto& f : r.flows) {
        flows.push_back(flow_body(f.flow, f.report));
    }
    j["flows"] = std::move(flows);
    Json hops = Json::array();
    for (const auto& h : r.link_budgets) {
        hops.push_back(hop_budget_json(h));
    }
    j["link_budget"] = std::move(hops);
    if (r.powerctl) {
        Json pc;
        const auto& run = *r.powerctl;
        pc["fp"] = powerctl::solve_report_to_json(run.instance, run.solve, run.mode);
        pc["oracle"] = run.oracle ? powerctl::oracle_result_to_json(run.instance, *run.oracle, run.grid_levels, run.mode)
                                  : Json(nullptr);
        j["powerctl"] = std::move(pc);
    } else {
        j["powerctl"] = nullptr;
    }
    return j;
}

std::vector<HopBudget> all_link_budgets(const ScenarioConfig& c)
{
    std::vector<HopBudget> hops{downlink_budget(c)};
    for (const auto kind : {linkbudget::TerminalKind::Smartphone, linkbudget::TerminalKind::Vsat}) {
        if (c.terminal(kind) != nullptr) {
            hops.push_back(uplink_budget(c, kind));
        }
    }
    return hops;
}

ReportWriter::ReportWriter(fs::path dir, OutputFormat format) : dir_(std::move(dir)), format_(format)
{
    fs::create_directories(dir_);
}

void ReportWriter::write(const std::string& stem, const std::string& csv, const Json& json)
{
    if (wants_csv()) {
        write_text(stem + ".csv", csv);
    }
    if (wants_json()) {
        write_json(stem + ".json", json);
    }
}

void ReportWriter::write_text(const std::string& name, const std::string& content)
{
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    out << content;
    written_.push_back(path);
}

void ReportWriter::write_json(const std::string& name, const Json& json) { write_text(name, json.dump(2) + "\n"); }

std::string ping_stem(const ReportContext& ctx)
{
    return fmt::format("ping_{}_seed{}", linkbudget::to_string(ctx.profile), ctx.seed);
}

std::string flow_stem(const ReportContext& ctx, const FlowConfig& flow)
{
    return fmt::format("{}_{}_seed{}", flow.id, linkbudget::to_string(ctx.profile), ctx.seed);
}

std::string console_summary(const std::vector<fs::path>& files)
{
    std::set<std::string> json_stems;
    for (const auto& f : files) {
        if (f.extension() == ".json") {
            json_stems.insert((f.parent_path() / f.stem()).string());
        }
    }
    std::string out;
    std::set<std::string> seen;
    for (const auto& f : files) {
        if (!seen.insert(f.string()).second) {
            continue;
        }
        try {
            if (f.extension() == ".json") {
                out += summarize_json(f, Json::parse(read_file(f)));
            } else if (f.extension() == ".csv" && json_stems.count((f.parent_path() / f.stem()).string()) == 0) {
                out += summarize_csv(f);
            }
        } catch (const std::exception& e) {
            out += fmt::format("{:<40} unreadable: {}\n", f.filename().string(), e.what());
        }
    }
    return out;
}

}  // namespace ntn::scenario
