#include "ntn/powerctl/objective.hpp"

#include <cmath>

namespace ntn::powerctl {

namespace {

double interference(const PowerControlInstance& inst, const PowerAllocation& z, std::size_t m, std::size_t n,
                    std::size_t b, InterferenceMode mode)
{
    double sum = 0.0;
    for (std::size_t other = 0; other < inst.stations(); ++other) {
        if (other == n) {
            continue;
        }
        if (mode == InterferenceMode::CrossGain) {
            double tx = 0.0;
            for (std::size_t u = 0; u < inst.users(); ++u) {
                tx += z.at(inst, u, other, b);
            }
            sum += tx * inst.gain(m, other, b);
        } else {
            const double gamma = inst.associated(m, n, b) ? 1.0 : 0.0;
            sum += gamma * z.at(inst, m, other, b) * inst.gain(m, n, b);
        }
    }
    return sum;
}

}  // namespace

double spectral_efficiency(const PowerControlInstance& inst, const PowerAllocation& z, std::size_t m,
                           std::size_t n, std::size_t b, InterferenceMode mode)
{
    if (!inst.associated(m, n, b)) {
        throw PowerControlError("spectral efficiency requested for an unassociated triple");
    }
    const double signal = z.at(inst, m, n, b) * inst.gain(m, n, b);
    return std::log2(1.0 + signal / (interference(inst, z, m, n, b, mode) + inst.noise_power()));
}

double sum_objective(const PowerControlInstance& inst, const PowerAllocation& z, InterferenceMode mode)
{
    double total = 0.0;
    for (const auto& t : inst.triples()) {
        total += spectral_efficiency(inst, z, t.user, t.station, t.rbg, mode);
    }
    return total;
}

std::vector<double> station_power(const PowerControlInstance& inst, const PowerAllocation& z)
{
    std::vector<double> used(inst.stations(), 0.0);
    for (std::size_t m = 0; m < inst.users(); ++m) {
        for (std::size_t n = 0; n < inst.stations(); ++n) {
            for (std::size_t b = 0; b < inst.rbgs(); ++b) {
                if (inst.associated(m, n, b)) {
                    used[n] += z.at(inst, m, n, b);
                }
            }
        }
    }
    return used;
}

std::vector<bool> power_budget_ok(const PowerControlInstance& inst, const PowerAllocation& z)
{
    const auto used = station_power(inst, z);
    std::vector<bool> ok(inst.stations());
    for (std::size_t n = 0; n < inst.stations(); ++n) {
        ok[n] = used[n] <= inst.max_power(n) * (1.0 + 1e-12);
    }
    return ok;
}

bool all_budgets_ok(const PowerControlInstance& inst, const PowerAllocation& z)
{
    for (bool ok : power_budget_ok(inst, z)) {
        if (!ok) {
            return false;
        }
    }
    return true;
}

bool respects_association(const PowerControlInstance& inst, const PowerAllocation& z)
{
    if (z.z.size() != inst.size()) {
        return false;
    }
    for (std::size_t i = 0; i < z.z.size(); ++i) {
        if (!(z.z[i] >= 0.0)) {
            return false;
        }
        if (inst.association()[i] == 0 && z.z[i] != 0.0) {
            return false;
        }
    }
    return true;
}

}  // namespace ntn::powerctl
