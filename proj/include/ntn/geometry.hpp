#pragma once

#include <stdexcept>

namespace ntn::geometry {

inline constexpr double kSpeedOfLight = 299'792'458.0;   // m/s
inline constexpr double kMeanEarthRadius = 6'371'000.0;  // m

class InvalidGeometry : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Ground-terminal-to-satellite geometry over a spherical Earth.
struct OrbitGeometry {
    double elevation_deg = 90.0;
    double altitude_m = 0.0;
    double earth_radius_m = kMeanEarthRadius;

    void validate() const;
};

/// Slant range in meters from a ground terminal seeing the satellite at the
/// given elevation. Equals the altitude at zenith and sqrt(2*Re*h + h^2) at
/// the horizon.
double slant_range(const OrbitGeometry& geom);

/// One-way free-space propagation delay in seconds.
double propagation_delay(double distance_m);

}  // namespace ntn::geometry
