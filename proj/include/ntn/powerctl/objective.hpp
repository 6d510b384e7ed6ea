#pragma once

#include <vector>

#include "ntn/powerctl/instance.hpp"

namespace ntn::powerctl {

/// log2(1 + signal / (interference + noise)) for an associated triple.
double spectral_efficiency(const PowerControlInstance& inst, const PowerAllocation& z, std::size_t m,
                           std::size_t n, std::size_t b,
                           InterferenceMode mode = InterferenceMode::CrossGain);

/// Sum of spectral efficiencies over every associated triple.
double sum_objective(const PowerControlInstance& inst, const PowerAllocation& z,
                     InterferenceMode mode = InterferenceMode::CrossGain);

/// Power each station spends over its associated triples.
std::vector<double> station_power(const PowerControlInstance& inst, const PowerAllocation& z);

/// Per-station budget check, with 1e-12 relative slack.
std::vector<bool> power_budget_ok(const PowerControlInstance& inst, const PowerAllocation& z);
bool all_budgets_ok(const PowerControlInstance& inst, const PowerAllocation& z);

/// True when z is non-negative and zero wherever the mask is zero.
bool respects_association(const PowerControlInstance& inst, const PowerAllocation& z);

}  // namespace ntn::powerctl
