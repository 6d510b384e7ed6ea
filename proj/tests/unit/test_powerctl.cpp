#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ntn/powerctl/instance.hpp"
#include "ntn/powerctl/instance_io.hpp"
#include "ntn/powerctl/objective.hpp"
#include "ntn/powerctl/solver.hpp"
#include "ntn/rng.hpp"

using namespace ntn;
using namespace ntn::powerctl;

namespace {

// Sum rate written out from the multi-cell SINR definition, walking users
// and stations directly rather than the triple list.
double oracle_objective(const PowerControlInstance& inst, const PowerAllocation& z)
{
    double total = 0.0;
    for (std::size_t m = 0; m < inst.users(); ++m) {
        for (std::size_t n = 0; n < inst.stations(); ++n) {
            for (std::size_t b = 0; b < inst.rbgs(); ++b) {
                if (!inst.associated(m, n, b)) {
                    continue;
                }
                double interf = 0.0;
                for (std::size_t n2 = 0; n2 < inst.stations(); ++n2) {
                    for (std::size_t m2 = 0; m2 < inst.users() && n2 != n; ++m2) {
                        interf += z.z[inst.index(m2, n2, b)] * inst.gain(m, n2, b);
                    }
                }
                total += std::log2(1.0 + z.z[inst.index(m, n, b)] * inst.gain(m, n, b)
                                             / (interf + inst.noise_power()));
            }
        }
    }
    return total;
}

// Two users, two stations, one RBG; user i served by station i.
PowerControlInstance two_cell(double direct0, double direct1, double cross01, double cross10, double noise = 1.0)
{
    // gain[m][n]: m = user, n = station
    std::vector<double> g{direct0, cross01, cross10, direct1};
    return PowerControlInstance(2, 2, 1, g, noise, {1.0, 1.0}, {1, 0, 0, 1});
}

bool budgets_and_mask_ok(const PowerControlInstance& inst, const PowerAllocation& z)
{
    return all_budgets_ok(inst, z) && respects_association(inst, z);
}

}  // namespace

TEST_CASE("spectral efficiency of a single link")
{
    const PowerControlInstance inst(1, 1, 1, {3.0}, 1.0, {1.0});
    auto z = PowerAllocation::zeros(inst);
    const auto assoc = inst.with_association({1});
    CHECK(spectral_efficiency(assoc, z, 0, 0, 0) == 0.0);
    z.z[0] = 1.0;
    CHECK(spectral_efficiency(assoc, z, 0, 0, 0) == doctest::Approx(2.0));
}

TEST_CASE("spectral efficiency with one interferer")
{
    // Serving term 4, interference 1, noise 1: log2(1 + 4/2).
    const auto inst = two_cell(4.0, 1.0, 1.0, 1.0);
    PowerAllocation z{{1.0, 0.0, 0.0, 1.0}};
    CHECK(spectral_efficiency(inst, z, 0, 0, 0) == doctest::Approx(std::log2(3.0)));
    CHECK(spectral_efficiency(inst, z, 0, 0, 0) == doctest::Approx(1.585).epsilon(1e-3));
    CHECK_THROWS_AS(spectral_efficiency(inst, z, 0, 1, 0), PowerControlError);
}

TEST_CASE("sum objective")
{
    // Disjoint cells with SNR 3 each; cross gains negligible.
    const auto inst = two_cell(3.0, 3.0, 1e-15, 1e-15);
    PowerAllocation z{{1.0, 0.0, 0.0, 1.0}};
    CHECK(sum_objective(inst, z) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sum_objective(inst, PowerAllocation::zeros(inst)) == 0.0);

    const PowerControlInstance single(1, 1, 1, {2.5}, 0.5, {1.0}, {1});
    PowerAllocation zs{{0.7}};
    CHECK(sum_objective(single, zs) == spectral_efficiency(single, zs, 0, 0, 0));
}

TEST_CASE("verbatim interference mode")
{
    const auto inst = two_cell(4.0, 1.0, 1.0, 1.0);
    PowerAllocation z{{1.0, 0.0, 0.0, 1.0}};
    // As typeset the interferer term uses z[m][n'], which the association
    // forces to zero, so the rate collapses to the noise-limited one.
    CHECK(spectral_efficiency(inst, z, 0, 0, 0, InterferenceMode::Verbatim) == doctest::Approx(std::log2(5.0)));
    const PowerControlInstance one(1, 1, 1, {3.0}, 1.0, {1.0}, {1});
    PowerAllocation full{{1.0}};
    CHECK(sum_objective(one, full, InterferenceMode::Verbatim) == sum_objective(one, full));
    CHECK(parse_interference_mode("verbatim") == InterferenceMode::Verbatim);
    CHECK(parse_interference_mode("cross_gain") == InterferenceMode::CrossGain);
    CHECK_THROWS(parse_interference_mode("other"));
}

TEST_CASE("power budgets")
{
    const PowerControlInstance inst(2, 1, 1, {1.0, 1.0}, 1.0, {1.0}, {1, 1});
    CHECK(all_budgets_ok(inst, PowerAllocation::zeros(inst)));
    CHECK_FALSE(power_budget_ok(inst, PowerAllocation{{0.6, 0.6}})[0]);
    CHECK(power_budget_ok(inst, PowerAllocation{{0.5, 0.5}})[0]);
}

TEST_CASE("greedy association")
{
    const PowerControlInstance one(3, 1, 1, {1.0, 2.0, 3.0}, 1.0, {1.0});
    CHECK(greedy_associate(one) == std::vector<std::uint8_t>{1, 1, 1});
    const PowerControlInstance argmax(1, 2, 1, {2.0, 5.0}, 1.0, {1.0, 1.0});
    CHECK(greedy_associate(argmax) == std::vector<std::uint8_t>{0, 1});
    const PowerControlInstance tie(1, 2, 1, {4.0, 4.0}, 1.0, {1.0, 1.0});
    CHECK(greedy_associate(tie) == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("single link solves to full power")
{
    const PowerControlInstance inst(1, 1, 1, {2.0}, 1.0, {0.8}, {1});
    const auto r = fp_solve(inst);
    CHECK(r.allocation.z[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(r.converged);
    const auto bf = brute_force_solve(inst);
    CHECK(bf.allocation.z[0] == 0.8);
}

TEST_CASE("symmetric two-cell instance gives symmetric contributions")
{
    const auto inst = two_cell(2.0, 2.0, 0.3, 0.3);
    const auto r = fp_solve(inst);
    const double se0 = spectral_efficiency(inst, r.allocation, 0, 0, 0);
    const double se1 = spectral_efficiency(inst, r.allocation, 1, 1, 0);
    CHECK(se0 == doctest::Approx(se1).epsilon(1e-6));
}

TEST_CASE("random 2x3x1 instance, seed 7, against the grid oracle")
{
    const auto inst = random_instance(2, 3, 1, 7);
    const auto fp = fp_solve(inst);
    const auto bf = brute_force_solve(inst, 32);
    CHECK(sum_objective(inst, fp.allocation) >= 0.95 * bf.objective);
}

TEST_CASE("strong cross gain silences one transmitter")
{
    // Interference 20x the serving gain: time-sharing beats coexistence.
    const auto inst = two_cell(1.0, 1.0, 20.0, 20.0, 0.01);
    const auto bf = brute_force_solve(inst, 8);
    const double a = bf.allocation.at(inst, 0, 0, 0);
    const double b = bf.allocation.at(inst, 1, 1, 0);
    CHECK(std::min(a, b) == 0.0);
    CHECK(std::max(a, b) == 1.0);
    CHECK(bf.objective == doctest::Approx(std::log2(1.0 + 100.0)));
}

TEST_CASE("default start also tries each station switched off")
{
    const auto inst = two_cell(1.0, 1.0, 20.0, 20.0, 0.01);
    // Both on: each SINR is 1 / 20.01, and the iteration stays put.
    const auto pinned = fp_solve(inst, equal_split(inst));
    CHECK(pinned.objective_trace.back() < 0.2);
    CHECK_FALSE(pinned.silenced_station.has_value());

    const auto fp = fp_solve(inst);
    REQUIRE(fp.silenced_station.has_value());
    CHECK(fp.objective_trace.back() == doctest::Approx(std::log2(1.0 + 100.0)));
    CHECK(fp.allocation.at(inst, *fp.silenced_station, *fp.silenced_station, 0) == 0.0);
    for (std::size_t k = 1; k < fp.objective_trace.size(); ++k) {
        CHECK(fp.objective_trace[k] >= fp.objective_trace[k - 1] - 1e-9);
    }
}

TEST_CASE("two-level grid is on/off enumeration")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = random_instance(1 + seed % 4, 1 + seed % 3, 1, seed);
        const auto triples = inst.triples();
        REQUIRE(triples.size() <= 4);
        // Each station can afford at most one triple at full power.
        double best = 0.0;
        for (std::uint32_t mask = 0; mask < (1u << triples.size()); ++mask) {
            auto z = PowerAllocation::zeros(inst);
            std::vector<int> on(inst.stations(), 0);
            for (std::size_t k = 0; k < triples.size(); ++k) {
                if ((mask >> k) & 1u) {
                    const auto& t = triples[k];
                    ++on[t.station];
                    z.at(inst, t.user, t.station, t.rbg) = inst.max_power(t.station);
                }
            }
            if (std::all_of(on.begin(), on.end(), [](int c) { return c <= 1; })) {
                best = std::max(best, oracle_objective(inst, z));
            }
        }
        CHECK(brute_force_solve(inst, 2).objective == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("brute force size guard")
{
    std::vector<double> g{1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
    const PowerControlInstance seven(7, 1, 1, g, 1.0, {1.0}, {1, 1, 1, 1, 1, 1, 1});
    REQUIRE(seven.triples().size() == 7);
    CHECK_THROWS_AS(brute_force_solve(seven), InstanceTooLarge);
    CHECK_NOTHROW(fp_solve(seven));
}

TEST_CASE("instance JSON round trip")
{
    const auto inst = random_instance(3, 2, 2, 11);
    const auto back = instance_from_json(instance_to_json(inst));
    CHECK(back.gains() == inst.gains());
    CHECK(back.association() == inst.association());
    CHECK(back.max_powers() == inst.max_powers());
    CHECK(back.noise_power() == inst.noise_power());
    const std::string path = NTN_SCENARIO_DIR "/powerctl/two-cell.json";
    const auto file = load_instance(path);
    CHECK(file.users() == 2);
    CHECK(file.triples().size() == 2);
}

TEST_CASE("malformed instances are rejected")
{
    CHECK_THROWS_AS(PowerControlInstance(1, 1, 1, {0.0}, 1.0, {1.0}), PowerControlError);
    CHECK_THROWS_AS(PowerControlInstance(1, 1, 1, {1.0, 2.0}, 1.0, {1.0}), PowerControlError);
    CHECK_THROWS_AS(PowerControlInstance(1, 1, 1, {1.0}, 0.0, {1.0}), PowerControlError);
    CHECK_THROWS_AS(PowerControlInstance(1, 2, 1, {1.0, 1.0}, 1.0, {1.0, 1.0}, {1, 1}), PowerControlError);
}

TEST_CASE("property: objective agrees with the direct SINR sum")
{
    RandomStream rng(31);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = random_instance(1 + seed % 4, 1 + seed % 3, 1 + seed % 2, seed);
        auto z = PowerAllocation::zeros(inst);
        for (const auto& t : inst.triples()) {
            z.at(inst, t.user, t.station, t.rbg) = rng.uniform(0.0, 0.3);
        }
        CHECK(sum_objective(inst, z) == doctest::Approx(oracle_objective(inst, z)).epsilon(1e-12));
    }
}

TEST_CASE("property: FP traces are monotone and every iterate is feasible")
{
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        CAPTURE(seed);
        const auto inst = random_instance(1 + seed % 4, 1 + seed % 3, 1 + seed % 3, seed);
        const auto r = fp_solve(inst);
        REQUIRE_FALSE(r.objective_trace.empty());
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
            CHECK(r.objective_trace[i] >= r.objective_trace[i - 1] - 1e-9);
        }
        CHECK(budgets_and_mask_ok(inst, r.allocation));
        CHECK(r.objective_trace.back() == doctest::Approx(sum_objective(inst, r.allocation)).epsilon(1e-12));
        // Iterates are reproducible by capping the iteration count.
        for (std::size_t k = 1; k <= std::min<std::size_t>(r.iterations, 5); ++k) {
            FpOptions o;
            o.max_iter = k;
            CHECK(budgets_and_mask_ok(inst, fp_solve(inst, std::nullopt, o).allocation));
        }
    }
}

TEST_CASE("property: grid oracle dominates the projected FP point")
{
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto inst = random_instance(1 + seed % 4, 1 + seed % 3, 1, seed);
        const auto fp = fp_solve(inst);
        const auto bf = brute_force_solve(inst, 16);
        const auto projected = project_to_grid(inst, fp.allocation, 16);
        CHECK(budgets_and_mask_ok(inst, projected));
        CHECK(bf.objective >= sum_objective(inst, projected) - 1e-12);
    }
}

TEST_CASE("property: common rescaling of gains and noise leaves rates unchanged")
{
    RandomStream rng(8);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = random_instance(2, 2, 2, seed);
        auto z = PowerAllocation::zeros(inst);
        for (const auto& t : inst.triples()) {
            z.at(inst, t.user, t.station, t.rbg) = rng.uniform(0.0, 0.5);
        }
        for (const double c : {1e-6, 0.37, 12.0, 4e5}) {
            const auto s = inst.scaled(c);
            for (const auto& t : inst.triples()) {
                CHECK(spectral_efficiency(s, z, t.user, t.station, t.rbg)
                      == doctest::Approx(spectral_efficiency(inst, z, t.user, t.station, t.rbg)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("property: greedy association ignores positive rescaling")
{
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = random_instance(3, 3, 2, seed);
        for (const double c : {1e-9, 0.5, 3.0, 1e9}) {
            CHECK(greedy_associate(inst.scaled(c)) == greedy_associate(inst));
        }
    }
}
