#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ntn/powerctl/instance.hpp"
#include "ntn/powerctl/solver.hpp"

namespace ntn::powerctl {

/// Instance file (JSON):
///   {"users": M, "stations": N, "rbgs": B,
///    "gain": [M*N*B values, row-major user, station, rbg],
///    "noise_power": d2, "max_power": [N values],
///    "association": [M*N*B of 0/1]}        // optional; greedy when absent
PowerControlInstance instance_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json instance_to_json(const PowerControlInstance& inst);
PowerControlInstance load_instance(const std::string& path);

nlohmann::ordered_json solve_report_to_json(const PowerControlInstance& inst, const SolveReport& report,
                                            InterferenceMode mode);
nlohmann::ordered_json oracle_result_to_json(const PowerControlInstance& inst, const BruteForceResult& result,
                                             std::size_t grid_levels, InterferenceMode mode);

/// iteration,objective
void write_trace_csv(std::ostream& out, const SolveReport& report);

}  // namespace ntn::powerctl
