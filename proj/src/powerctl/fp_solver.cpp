#include "ntn/powerctl/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ntn/powerctl/objective.hpp"

namespace ntn::powerctl {

namespace {

// SINR of triple i is g[i] z[i] / (sum_j coupling[i][j] z[j] + noise).
struct LinearSinrModel {
    std::vector<Triple> triples;
    std::vector<double> direct;
    std::vector<std::vector<double>> coupling;
    double noise = 1.0;

    LinearSinrModel(const PowerControlInstance& inst, InterferenceMode mode)
        : triples(inst.triples()), noise(inst.noise_power())
    {
        const auto k = triples.size();
        direct.resize(k);
        coupling.assign(k, std::vector<double>(k, 0.0));
        for (std::size_t i = 0; i < k; ++i) {
            const auto& ti = triples[i];
            direct[i] = inst.gain(ti.user, ti.station, ti.rbg);
            for (std::size_t j = 0; j < k; ++j) {
                const auto& tj = triples[j];
                if (tj.rbg != ti.rbg || tj.station == ti.station) {
                    continue;
                }
                if (mode == InterferenceMode::CrossGain) {
                    coupling[i][j] = inst.gain(ti.user, tj.station, ti.rbg);
                } else if (tj.user == ti.user) {
                    coupling[i][j] = direct[i];
                }
            }
        }
    }
};

std::vector<double> gather(const PowerControlInstance& inst, const LinearSinrModel& model,
                           const PowerAllocation& z)
{
    std::vector<double> out(model.triples.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& t = model.triples[i];
        out[i] = z.at(inst, t.user, t.station, t.rbg);
    }
    return out;
}

PowerAllocation scatter(const PowerControlInstance& inst, const LinearSinrModel& model,
                        const std::vector<double>& p)
{
    auto z = PowerAllocation::zeros(inst);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& t = model.triples[i];
        z.at(inst, t.user, t.station, t.rbg) = p[i];
    }
    return z;
}

// maximize sum_i a_i sqrt(p_i) - c_i p_i  s.t.  sum_i p_i <= budget, p >= 0.
// Stationarity gives p_i(lambda) = (a_i / (2 (c_i + lambda)))^2, decreasing
// in lambda; the multiplier is found by bisection.
void solve_station(const std::vector<std::size_t>& members, const std::vector<double>& a,
                   const std::vector<double>& c, double budget, double budget_tol, std::vector<double>& p)
{
    auto power_at = [&](double lambda) {
        double sum = 0.0;
        for (auto i : members) {
            const double v = a[i] / (2.0 * (c[i] + lambda));
            sum += v * v;
        }
        return sum;
    };
    auto assign = [&](double lambda) {
        for (auto i : members) {
            const double v = a[i] / (2.0 * (c[i] + lambda));
            p[i] = v * v;
        }
    };
    if (power_at(0.0) <= budget) {
        assign(0.0);
        return;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (power_at(hi) > budget) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (power_at(mid) > budget) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (budget - power_at(hi) <= budget_tol * budget) {
            break;
        }
    }
    assign(hi);
}

}  // namespace

PowerAllocation equal_split(const PowerControlInstance& inst)
{
    std::vector<std::size_t> count(inst.stations(), 0);
    const auto triples = inst.triples();
    for (const auto& t : triples) {
        ++count[t.station];
    }
    auto z = PowerAllocation::zeros(inst);
    for (const auto& t : triples) {
        z.at(inst, t.user, t.station, t.rbg) = inst.max_power(t.station) / static_cast<double>(count[t.station]);
    }
    return z;
}

namespace {

SolveReport run_fp(const PowerControlInstance& inst, const LinearSinrModel& model,
                   const std::vector<std::vector<std::size_t>>& members, PowerAllocation z0, const FpOptions& opts)
{
    const auto k = model.triples.size();
    SolveReport report;
    std::vector<double> p = gather(inst, model, z0);
    report.allocation = std::move(z0);
    double prev = sum_objective(inst, report.allocation, opts.mode);
    report.objective_trace.push_back(prev);

    std::vector<double> a(k), c(k), y(k);
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
        for (std::size_t i = 0; i < k; ++i) {
            const double signal = model.direct[i] * p[i];
            double denom = model.noise;
            for (std::size_t j = 0; j < k; ++j) {
                denom += model.coupling[i][j] * p[j];
            }
            const double sinr = signal / denom;
            y[i] = std::sqrt((1.0 + sinr) * signal) / (signal + denom);
            a[i] = 2.0 * y[i] * std::sqrt((1.0 + sinr) * model.direct[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            c[i] = y[i] * y[i] * model.direct[i];
            for (std::size_t j = 0; j < k; ++j) {
                c[i] += y[j] * y[j] * model.coupling[j][i];
            }
        }
        for (std::size_t n = 0; n < inst.stations(); ++n) {
            if (!members[n].empty()) {
                solve_station(members[n], a, c, inst.max_power(n), opts.budget_tol, p);
            }
        }

        report.allocation = scatter(inst, model, p);
        const double obj = sum_objective(inst, report.allocation, opts.mode);
        report.objective_trace.push_back(obj);
        report.iterations = iter + 1;
        if (std::abs(obj - prev) <= opts.tol * std::max(std::abs(prev), 1e-300)) {
            report.converged = true;
            break;
        }
        prev = obj;
    }
    return report;
}

}  // namespace

SolveReport fp_solve(const PowerControlInstance& inst, std::optional<PowerAllocation> init, const FpOptions& opts)
{
    PowerAllocation z0 = init ? *init : equal_split(inst);
    if (!respects_association(inst, z0) || !all_budgets_ok(inst, z0)) {
        throw PowerControlError("initial allocation is infeasible");
    }
    const LinearSinrModel model(inst, opts.mode);
    std::vector<std::vector<std::size_t>> members(inst.stations());
    for (std::size_t i = 0; i < model.triples.size(); ++i) {
        members[model.triples[i].station].push_back(i);
    }

    auto best = run_fp(inst, model, members, z0, opts);
    if (init) {
        return best;
    }
    const auto active = std::count_if(members.begin(), members.end(), [](const auto& v) { return !v.empty(); });
    if (active < 2) {
        return best;
    }
    // The iteration never revives a zero power, so each start explores the
    // stationary points with one station switched off.
    for (std::size_t n = 0; n < inst.stations(); ++n) {
        if (members[n].empty()) {
            continue;
        }
        auto start = z0;
        for (const auto i : members[n]) {
            const auto& t = model.triples[i];
            start.at(inst, t.user, t.station, t.rbg) = 0.0;
        }
        auto run = run_fp(inst, model, members, std::move(start), opts);
        if (run.objective_trace.back() > best.objective_trace.back()) {
            best = std::move(run);
            best.silenced_station = n;
        }
    }
    return best;
}

}  // namespace ntn::powerctl
