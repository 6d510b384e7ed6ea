#include "ntn/powerctl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ntn/powerctl/objective.hpp"

namespace ntn::powerctl {

namespace {

double grid_step(const PowerControlInstance& inst, std::size_t station, std::size_t levels)
{
    return inst.max_power(station) / static_cast<double>(levels - 1);
}

}  // namespace

BruteForceResult brute_force_solve(const PowerControlInstance& inst, std::size_t grid_levels, InterferenceMode mode)
{
    if (grid_levels < 2) {
        throw PowerControlError("brute force needs at least two grid levels");
    }
    const auto triples = inst.triples();
    if (triples.size() > kMaxBruteForceTriples) {
        throw InstanceTooLarge("brute force supports at most " + std::to_string(kMaxBruteForceTriples)
                               + " associated triples, instance has " + std::to_string(triples.size()));
    }

    // Budgets are checked on integer level sums: sum of levels <= L-1 per
    // station is exactly C1 on this grid.
    const auto top = static_cast<long>(grid_levels - 1);
    std::vector<long> remaining(inst.stations(), top);
    std::vector<long> level(triples.size(), 0);
    auto z = PowerAllocation::zeros(inst);

    BruteForceResult best;
    best.objective = -1.0;

    auto visit = [&](auto&& self, std::size_t depth) -> void {
        if (depth == triples.size()) {
            ++best.evaluated;
            double obj = 0.0;
            for (const auto& t : triples) {
                obj += spectral_efficiency(inst, z, t.user, t.station, t.rbg, mode);
            }
            if (obj > best.objective) {
                best.objective = obj;
                best.allocation = z;
            }
            return;
        }
        const auto& t = triples[depth];
        const double step = grid_step(inst, t.station, grid_levels);
        for (long l = 0; l <= remaining[t.station]; ++l) {
            level[depth] = l;
            z.at(inst, t.user, t.station, t.rbg) = l == top ? inst.max_power(t.station) : step * static_cast<double>(l);
            remaining[t.station] -= l;
            self(self, depth + 1);
            remaining[t.station] += l;
        }
        z.at(inst, t.user, t.station, t.rbg) = 0.0;
    };
    visit(visit, 0);
    if (best.objective < 0.0) {
        best.objective = 0.0;
        best.allocation = PowerAllocation::zeros(inst);
    }
    return best;
}

PowerAllocation project_to_grid(const PowerControlInstance& inst, const PowerAllocation& z, std::size_t grid_levels)
{
    if (grid_levels < 2) {
        throw PowerControlError("grid needs at least two levels");
    }
    const auto top = static_cast<long>(grid_levels - 1);
    auto out = PowerAllocation::zeros(inst);
    std::vector<long> used(inst.stations(), 0);
    for (const auto& t : inst.triples()) {
        const double step = grid_step(inst, t.station, grid_levels);
        long l = static_cast<long>(std::floor(z.at(inst, t.user, t.station, t.rbg) / step + 1e-12));
        l = std::clamp(l, 0L, top - used[t.station]);
        used[t.station] += l;
        out.at(inst, t.user, t.station, t.rbg) = l == top ? inst.max_power(t.station) : step * static_cast<double>(l);
    }
    return out;
}

}  // namespace ntn::powerctl
