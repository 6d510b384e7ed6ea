#include "ntn/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ntn::geometry {

void OrbitGeometry::validate() const
{
    if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0)) {
        throw InvalidGeometry("elevation_deg must lie in [0, 90], got " + std::to_string(elevation_deg));
    }
    if (!(altitude_m > 0.0) || !std::isfinite(altitude_m)) {
        throw InvalidGeometry("altitude_m must be positive, got " + std::to_string(altitude_m));
    }
    if (!(earth_radius_m > 0.0) || !std::isfinite(earth_radius_m)) {
        throw InvalidGeometry("earth_radius_m must be positive, got " + std::to_string(earth_radius_m));
    }
}

double slant_range(const OrbitGeometry& geom)
{
    geom.validate();
    const double eps = geom.elevation_deg * std::numbers::pi / 180.0;
    const double re = geom.earth_radius_m;
    const double orbit = re + geom.altitude_m;
    const double c = re * std::cos(eps);
    return std::sqrt(orbit * orbit - c * c) - re * std::sin(eps);
}

double propagation_delay(double distance_m)
{
    if (!(distance_m >= 0.0)) {
        throw InvalidGeometry("distance must be non-negative");
    }
    return distance_m / kSpeedOfLight;
}

}  // namespace ntn::geometry
