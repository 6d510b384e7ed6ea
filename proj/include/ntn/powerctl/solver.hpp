#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ntn/powerctl/instance.hpp"

namespace ntn::powerctl {

struct SolveReport {
    PowerAllocation allocation;
    std::vector<double> objective_trace;  // objective after init, then after each iteration
    std::size_t iterations = 0;
    bool converged = false;
    // Station whose switched-off start produced the reported run.
    std::optional<std::size_t> silenced_station;
};

struct FpOptions {
    double tol = 1e-6;
    std::size_t max_iter = 1000;
    InterferenceMode mode = InterferenceMode::CrossGain;
    double budget_tol = 1e-10;
};

/// Equal split of each station's budget over its associated triples.
PowerAllocation equal_split(const PowerControlInstance& inst);

/// Quadratic-transform fractional programming for the sum spectral
/// efficiency with the association held fixed. Each iteration updates the
/// SINR and quadratic auxiliaries in closed form and then re-solves the
/// concave per-station power problem by bisection on the budget multiplier.
/// Without `init` the iteration also restarts once per station with that
/// station silenced and reports the best run; with `init` it runs once.
SolveReport fp_solve(const PowerControlInstance& inst, std::optional<PowerAllocation> init = std::nullopt,
                     const FpOptions& opts = {});

struct BruteForceResult {
    PowerAllocation allocation;
    double objective = 0.0;
    std::size_t evaluated = 0;
};

inline constexpr std::size_t kMaxBruteForceTriples = 6;

/// Exhaustive search over per-triple powers on {0, G/(L-1), ..., G} subject
/// to each station budget. Throws InstanceTooLarge above six associated
/// triples.
BruteForceResult brute_force_solve(const PowerControlInstance& inst, std::size_t grid_levels = 32,
                                   InterferenceMode mode = InterferenceMode::CrossGain);

/// Rounds each power down to the grid used by brute_force_solve.
PowerAllocation project_to_grid(const PowerControlInstance& inst, const PowerAllocation& z,
                                std::size_t grid_levels);

}  // namespace ntn::powerctl
