#include "ntn/rng.hpp"

#include <cmath>
#include <numbers>

namespace ntn {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view label) noexcept
{
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept
{
    return splitmix64(splitmix64(parent) ^ fnv1a64(label));
}

std::uint64_t RandomStream::next_u64() noexcept
{
    // splitmix64 adds the golden gamma itself, so draw k is mix(key + k*gamma).
    return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++);
}

double RandomStream::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

double RandomStream::lognormal(double mu, double sigma) noexcept
{
    return std::exp(mu + sigma * normal());
}

}  // namespace ntn
