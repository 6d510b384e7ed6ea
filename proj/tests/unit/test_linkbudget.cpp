#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "ntn/linkbudget.hpp"

using namespace ntn::linkbudget;

namespace {

// Friis form 20 log10(4 pi r f / c). Its constant is 32.44 rather than the
// rounded 32.45, so agreement is expected within about 0.003 dB.
double fspl_friis_db(double freq_ghz, double distance_m)
{
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * freq_ghz * 1e9 / 299'792'458.0);
}

PathLossBreakdown table_losses(double fspl)
{
    PathLossBreakdown l;
    l.fspl_db = fspl;
    l.shadow_db = 2.6;
    l.polarization_db = 3.0;
    l.misalignment_db = 0.5;
    return l;
}

}  // namespace

TEST_CASE("fspl constant at 1 GHz and 1 m")
{
    CHECK(fspl_db(1.0, 1.0) == doctest::Approx(32.45).epsilon(1e-12));
}

TEST_CASE("fspl at the downlink and uplink carriers")
{
    const double dl = fspl_db(12.7, 582'200.0);
    const double ul = fspl_db(14.5, 582'200.0);
    CHECK(std::abs(dl - 169.83) <= 0.01);
    CHECK(std::abs(ul - 170.98) <= 0.01);
    CHECK(std::abs(dl - fspl_friis_db(12.7, 582'200.0)) <= 0.01);
    CHECK(std::abs(ul - fspl_friis_db(14.5, 582'200.0)) <= 0.01);
}

TEST_CASE("total path loss")
{
    PathLossBreakdown clear;
    clear.fspl_db = 169.83;
    CHECK(total_path_loss_db(clear) == doctest::Approx(169.83));
    CHECK(total_path_loss_db(table_losses(169.83)) == doctest::Approx(175.93).epsilon(1e-12));
    CHECK(total_path_loss_db(PathLossBreakdown{}) == 0.0);

    auto bad = clear;
    bad.shadow_db = -1.0;
    CHECK_THROWS_AS(total_path_loss_db(bad), LinkBudgetError);
    bad.shadow_db = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(total_path_loss_db(bad), LinkBudgetError);
}

TEST_CASE("carrier to noise density")
{
    CHECK(cn0_db_hz(50.9, 9.2, 175.93) == doctest::Approx(112.77).epsilon(1e-9));
    CHECK(cn0_db_hz(0.0, 0.0, 228.6) == doctest::Approx(0.0));
    CHECK(cn0_db_hz(50.9, 9.2, 169.83) == doctest::Approx(118.87).epsilon(1e-9));
}

TEST_CASE("shannon capacity")
{
    CHECK(shannon_capacity_bps(1e6, 0.0) == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(shannon_capacity_bps(60e6, -std::numeric_limits<double>::infinity()) == 0.0);

    const double snr = snr_db_from_cn0(112.77, 240e6);
    CHECK(snr == doctest::Approx(28.97).epsilon(1e-4));
    // Hand chain: SNR linear = 10^(2.8968), C = B log2(1 + SNR).
    const double oracle = 240e6 * std::log2(1.0 + std::pow(10.0, (112.77 - 10.0 * std::log10(240e6)) / 10.0));
    CHECK(shannon_capacity_bps(240e6, snr) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(shannon_capacity_bps(240e6, snr) / 2.31e9 - 1.0) <= 0.01);
}

TEST_CASE("effective link rate")
{
    CHECK(effective_link_rate_bps(100e6, 0.5) == doctest::Approx(50e6));
    CHECK(effective_link_rate_bps(2.31e9, 1.0) == 2.31e9);
    CHECK(effective_link_rate_bps(2.31e9, 55e6 / 2.31e9) == doctest::Approx(55e6));
    CHECK(55e6 / 2.31e9 == doctest::Approx(0.0238).epsilon(1e-3));
    CHECK_THROWS_AS(effective_link_rate_bps(1e6, 0.0), LinkBudgetError);
    CHECK_THROWS_AS(effective_link_rate_bps(1e6, 1.5), LinkBudgetError);
}

TEST_CASE("unit conversions")
{
    CHECK(dbm_to_dbw(80.9) == doctest::Approx(50.9));
    CHECK(dbm_to_dbw(30.0) == 0.0);
    CHECK(dbw_to_dbm(50.9) == doctest::Approx(80.9));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK_THROWS_AS(linear_to_db(0.0), LinkBudgetError);
}

TEST_CASE("EIRP pair consistency")
{
    LinkBudgetParams p;
    p.carrier_freq_ghz = 12.7;
    p.bandwidth_hz = 240e6;
    p.eirp_dbw = 50.9;
    p.figure_of_merit_db_per_k = 9.2;
    p.losses = table_losses(169.83);
    p.eirp_dbm = 80.9;
    CHECK_NOTHROW(p.validate());
    p.eirp_dbm = 60.0;
    CHECK_THROWS_AS(p.validate(), LinkBudgetError);
    p.eirp_dbm = 81.0;
    CHECK_THROWS_AS(p.validate(), LinkBudgetError);
}

TEST_CASE("full downlink chain")
{
    LinkBudgetParams p;
    p.carrier_freq_ghz = 12.7;
    p.bandwidth_hz = 240e6;
    p.eirp_dbw = 50.9;
    p.figure_of_merit_db_per_k = 9.2;
    p.losses = table_losses(169.83);
    const auto r = evaluate(p);
    CHECK(r.path_loss_db == doctest::Approx(175.93));
    CHECK(r.cn0_db_hz == doctest::Approx(112.77));
    CHECK(std::abs(r.capacity_bps / 2.31e9 - 1.0) <= 0.01);
}

TEST_CASE("terminal profiles")
{
    CHECK(parse_terminal_kind("smartphone") == TerminalKind::Smartphone);
    CHECK(parse_terminal_kind("vsat") == TerminalKind::Vsat);
    CHECK_FALSE(parse_terminal_kind("laptop").has_value());
    const auto phone = TerminalProfile::reference_smartphone();
    CHECK(phone.eirp_dbw() == doctest::Approx(dbm_to_dbw(phone.tx_power_dbm) + phone.tx_antenna_gain_dbi));
    CHECK(TerminalProfile::reference_default(TerminalKind::Vsat) == TerminalProfile::reference_vsat());
}

TEST_CASE("property: dB round trip")
{
    for (double x = 1e-12; x < 1e12; x *= 3.3) {
        CHECK(db_to_linear(linear_to_db(x)) == doctest::Approx(x).epsilon(1e-9));
    }
}

TEST_CASE("property: fspl strictly increasing in both arguments")
{
    for (double f = 0.5; f < 60.0; f *= 1.7) {
        for (double r = 10.0; r < 4e7; r *= 2.9) {
            CHECK(fspl_db(f * 1.01, r) > fspl_db(f, r));
            CHECK(fspl_db(f, r * 1.01) > fspl_db(f, r));
        }
    }
}

TEST_CASE("property: total loss is additive and order-free")
{
    std::array<double, 7> v{169.83, 0.4, 0.1, 0.7, 2.6, 3.0, 0.5};
    const double expected = 169.83 + 0.4 + 0.1 + 0.7 + 2.6 + 3.0 + 0.5;
    std::sort(v.begin(), v.end());
    int perms = 0;
    do {
        const PathLossBreakdown l{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
        CHECK(total_path_loss_db(l) == doctest::Approx(expected).epsilon(1e-12));
        ++perms;
    } while (std::next_permutation(v.begin(), v.end()) && perms < 720);
}

TEST_CASE("property: capacity monotone in SNR and linear in bandwidth")
{
    double prev = 0.0;
    for (double snr = -30.0; snr <= 40.0; snr += 0.5) {
        const double c = shannon_capacity_bps(10e6, snr);
        CHECK(c >= prev);
        prev = c;
        CHECK(shannon_capacity_bps(30e6, snr) == doctest::Approx(3.0 * c).epsilon(1e-12));
    }
}
