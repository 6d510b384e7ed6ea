#include "ntn/powerctl/instance_io.hpp"

#include <fstream>
#include <ostream>
#include <set>

#include <fmt/format.h>

namespace ntn::powerctl {

using nlohmann::ordered_json;

namespace {

const std::set<std::string> kInstanceKeys{"users", "stations", "rbgs", "gain", "noise_power", "max_power",
                                          "association"};

ordered_json allocation_json(const PowerControlInstance& inst, const PowerAllocation& z)
{
    ordered_json rows = ordered_json::array();
    for (const auto& t : inst.triples()) {
        rows.push_back({{"user", t.user},
                        {"station", t.station},
                        {"rbg", t.rbg},
                        {"power_w", z.at(inst, t.user, t.station, t.rbg)}});
    }
    return rows;
}

}  // namespace

PowerControlInstance instance_from_json(const ordered_json& j)
{
    if (!j.is_object()) {
        throw PowerControlError("instance must be a JSON object");
    }
    for (const auto& item : j.items()) {
        if (!kInstanceKeys.count(item.key())) {
            throw PowerControlError("unknown instance key '" + item.key() + "'");
        }
    }
    for (const char* key : {"users", "stations", "rbgs", "gain", "noise_power", "max_power"}) {
        if (!j.contains(key)) {
            throw PowerControlError(std::string("instance is missing '") + key + "'");
        }
    }
    try {
        PowerControlInstance inst(j.at("users").get<std::size_t>(), j.at("stations").get<std::size_t>(),
                                  j.at("rbgs").get<std::size_t>(), j.at("gain").get<std::vector<double>>(),
                                  j.at("noise_power").get<double>(), j.at("max_power").get<std::vector<double>>());
        if (j.contains("association")) {
            return inst.with_association(j.at("association").get<std::vector<std::uint8_t>>());
        }
        return inst.with_association(greedy_associate(inst));
    } catch (const nlohmann::json::exception& e) {
        throw PowerControlError(std::string("malformed instance: ") + e.what());
    }
}

ordered_json instance_to_json(const PowerControlInstance& inst)
{
    ordered_json j;
    j["users"] = inst.users();
    j["stations"] = inst.stations();
    j["rbgs"] = inst.rbgs();
    j["gain"] = inst.gains();
    j["noise_power"] = inst.noise_power();
    j["max_power"] = inst.max_powers();
    j["association"] = inst.association();
    return j;
}

PowerControlInstance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw PowerControlError("cannot open instance file '" + path + "'");
    }
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw PowerControlError("instance file '" + path + "': " + e.what());
    }
    return instance_from_json(j);
}

ordered_json solve_report_to_json(const PowerControlInstance& inst, const SolveReport& report, InterferenceMode mode)
{
    ordered_json j;
    j["solver"] = "fp";
    j["interference_mode"] = std::string(to_string(mode));
    j["objective"] = report.objective_trace.empty() ? 0.0 : report.objective_trace.back();
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    if (report.silenced_station) {
        j["silenced_station"] = *report.silenced_station;
    }
    j["allocation"] = allocation_json(inst, report.allocation);
    j["trace"] = report.objective_trace;
    return j;
}

ordered_json oracle_result_to_json(const PowerControlInstance& inst, const BruteForceResult& result,
                                   std::size_t grid_levels, InterferenceMode mode)
{
    ordered_json j;
    j["solver"] = "brute_force";
    j["interference_mode"] = std::string(to_string(mode));
    j["grid_levels"] = grid_levels;
    j["objective"] = result.objective;
    j["evaluated"] = result.evaluated;
    j["allocation"] = allocation_json(inst, result.allocation);
    return j;
}

void write_trace_csv(std::ostream& out, const SolveReport& report)
{
    out << "iteration,objective\n";
    for (std::size_t i = 0; i < report.objective_trace.size(); ++i) {
        out << fmt::format("{},{:.12f}\n", i, report.objective_trace[i]);
    }
}

}  // namespace ntn::powerctl
