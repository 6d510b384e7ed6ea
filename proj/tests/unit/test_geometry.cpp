#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ntn/geometry.hpp"

using namespace ntn::geometry;

namespace {

// Independent route: nadir angle from the sine rule, then the central angle,
// then the chord opposite it. Shares no algebra with the quadratic closed form.
double slant_range_by_angles(double elevation_deg, double altitude_m, double re_m)
{
    const double e = elevation_deg * std::numbers::pi / 180.0;
    const double nadir = std::asin(re_m * std::cos(e) / (re_m + altitude_m));
    const double central = std::numbers::pi / 2.0 - e - nadir;
    return (re_m + altitude_m) * std::sin(central) / std::cos(e);
}

}  // namespace

TEST_CASE("zenith slant range equals altitude")
{
    CHECK(slant_range({90.0, 550'000.0}) == doctest::Approx(550'000.0).epsilon(1e-12));
}

TEST_CASE("70 degree elevation at 550 km")
{
    const double d = slant_range({70.0, 550'000.0, 6'371'000.0});
    CHECK(std::abs(d - 582'200.0) <= 500.0);
    CHECK(d == doctest::Approx(slant_range_by_angles(70.0, 550'000.0, 6'371'000.0)).epsilon(1e-9));
}

TEST_CASE("horizon slant range")
{
    const double d = slant_range({0.0, 550'000.0, 6'371'000.0});
    CHECK(std::abs(d - 2'703'800.0) <= 1000.0);
    CHECK(d == doctest::Approx(std::sqrt(2.0 * 6'371'000.0 * 550'000.0 + 550'000.0 * 550'000.0)).epsilon(1e-12));
}

TEST_CASE("propagation delay")
{
    CHECK(propagation_delay(0.0) == 0.0);
    CHECK(propagation_delay(299'792'458.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(propagation_delay(582'200.0) * 1e3 - 1.942) <= 0.001);
}

TEST_CASE("invalid geometry is rejected")
{
    CHECK_THROWS_AS(slant_range({-1.0, 550'000.0}), InvalidGeometry);
    CHECK_THROWS_AS(slant_range({91.0, 550'000.0}), InvalidGeometry);
    CHECK_THROWS_AS(slant_range({70.0, -5.0}), InvalidGeometry);
    CHECK_THROWS_AS(slant_range({70.0, 550'000.0, 0.0}), InvalidGeometry);
    CHECK_THROWS_AS(propagation_delay(-1.0), InvalidGeometry);
    CHECK_THROWS_AS(slant_range({std::nan(""), 550'000.0}), InvalidGeometry);
}

TEST_CASE("property: slant range decreases with elevation")
{
    for (const double h : {300e3, 550e3, 1200e3, 35'786e3}) {
        double prev = slant_range({0.5, h});
        for (double e = 1.0; e < 90.0; e += 0.5) {
            const double d = slant_range({e, h});
            CHECK(d < prev);
            prev = d;
        }
    }
}

TEST_CASE("property: slant range bounded by altitude and horizon distance")
{
    const double re = kMeanEarthRadius;
    for (const double h : {200e3, 550e3, 8000e3}) {
        const double horizon = std::sqrt(2.0 * re * h + h * h);
        for (double e = 0.0; e <= 90.0; e += 2.5) {
            const double d = slant_range({e, h});
            CHECK(d >= h * (1.0 - 1e-12));
            CHECK(d <= horizon * (1.0 + 1e-12));
            if (e > 0.0 && e < 90.0) {
                CHECK(d == doctest::Approx(slant_range_by_angles(e, h, re)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("property: propagation delay is additive")
{
    for (double a = 0.0; a < 4e7; a += 3.7e6) {
        for (double b = 1.0; b < 4e7; b += 5.3e6) {
            const double sum = propagation_delay(a + b);
            CHECK(std::abs(sum - (propagation_delay(a) + propagation_delay(b))) <= 4.0 * sum * 1e-16);
        }
    }
}
