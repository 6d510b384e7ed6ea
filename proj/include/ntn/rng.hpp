#pragma once

#include <cstdint>
#include <string_view>

namespace ntn {

// Portable, platform-independent random streams. Every stream is a SplitMix64
// counter keyed by a 64-bit seed, so two builds on different standard
// libraries produce the same draws.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a over the bytes of a label.
std::uint64_t fnv1a64(std::string_view label) noexcept;

// Key for a child stream: mix(parent, hash(label)). Used for
// seed -> flow -> link derivation so adding a link never shifts another
// link's draws.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

class RandomStream {
public:
    explicit RandomStream(std::uint64_t key = 0) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the paired variate is cached.
    double normal() noexcept;
    double lognormal(double mu, double sigma) noexcept;

    std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ntn
