#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace ntn::powerctl {

class PowerControlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InstanceTooLarge : public PowerControlError {
public:
    using PowerControlError::PowerControlError;
};

/// How the SINR denominator of a (user, station, RBG) triple is formed.
///  CrossGain: sum over other stations n' of their total power on the RBG
///             times the cross gain theta[m][n'][b].
///  Verbatim:  the formula exactly as typeset, sum over n' != n of
///             gamma[m][n][b] * z[m][n'][b] * theta[m][n][b].
enum class InterferenceMode { CrossGain, Verbatim };

std::string_view to_string(InterferenceMode mode) noexcept;
InterferenceMode parse_interference_mode(std::string_view name);

struct Triple {
    std::size_t user = 0;
    std::size_t station = 0;
    std::size_t rbg = 0;
    bool operator==(const Triple&) const = default;
};

/// Dimensions, gains (row-major [user][station][rbg], linear), noise power,
/// per-station power budgets, and the binary association mask.
class PowerControlInstance {
public:
    PowerControlInstance() = default;
    PowerControlInstance(std::size_t users, std::size_t stations, std::size_t rbgs, std::vector<double> gain,
                         double noise_power, std::vector<double> max_power,
                         std::vector<std::uint8_t> association = {});

    std::size_t users() const noexcept { return users_; }
    std::size_t stations() const noexcept { return stations_; }
    std::size_t rbgs() const noexcept { return rbgs_; }
    std::size_t size() const noexcept { return users_ * stations_ * rbgs_; }

    std::size_t index(std::size_t m, std::size_t n, std::size_t b) const noexcept
    {
        return (m * stations_ + n) * rbgs_ + b;
    }

    double gain(std::size_t m, std::size_t n, std::size_t b) const { return gain_.at(index(m, n, b)); }
    bool associated(std::size_t m, std::size_t n, std::size_t b) const
    {
        return association_.at(index(m, n, b)) != 0;
    }
    double noise_power() const noexcept { return noise_power_; }
    double max_power(std::size_t n) const { return max_power_.at(n); }

    const std::vector<double>& gains() const noexcept { return gain_; }
    const std::vector<double>& max_powers() const noexcept { return max_power_; }
    const std::vector<std::uint8_t>& association() const noexcept { return association_; }
    bool has_association() const noexcept;

    PowerControlInstance with_association(std::vector<std::uint8_t> association) const;
    PowerControlInstance scaled(double factor) const;

    /// Associated triples in row-major order.
    std::vector<Triple> triples() const;

private:
    void validate() const;

    std::size_t users_ = 0;
    std::size_t stations_ = 0;
    std::size_t rbgs_ = 0;
    std::vector<double> gain_;
    double noise_power_ = 1.0;
    std::vector<double> max_power_;
    std::vector<std::uint8_t> association_;
};

/// Transmit powers z[user][station][rbg] in watts, same layout as the gains.
struct PowerAllocation {
    std::vector<double> z;

    static PowerAllocation zeros(const PowerControlInstance& inst) { return {std::vector<double>(inst.size(), 0.0)}; }
    double at(const PowerControlInstance& inst, std::size_t m, std::size_t n, std::size_t b) const
    {
        return z.at(inst.index(m, n, b));
    }
    double& at(const PowerControlInstance& inst, std::size_t m, std::size_t n, std::size_t b)
    {
        return z.at(inst.index(m, n, b));
    }
};

/// Every station on the user-RBG pair with the largest gain; ties go to the
/// lowest station index.
std::vector<std::uint8_t> greedy_associate(const PowerControlInstance& inst);

/// Seeded toy instance: gains drawn log-uniformly in [gain_lo_db, gain_hi_db]
/// for every triple, unit noise, unit budgets, greedy association.
struct RandomInstanceOptions {
    double gain_lo_db = -10.0;
    double gain_hi_db = 20.0;
    double noise_power = 1.0;
    double max_power = 1.0;
};

PowerControlInstance random_instance(std::size_t users, std::size_t stations, std::size_t rbgs,
                                     std::uint64_t seed, const RandomInstanceOptions& opts = {});

}  // namespace ntn::powerctl
