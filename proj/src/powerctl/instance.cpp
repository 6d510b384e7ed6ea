#include "ntn/powerctl/instance.hpp"

#include <cmath>
#include <string>

#include "ntn/rng.hpp"

namespace ntn::powerctl {

std::string_view to_string(InterferenceMode mode) noexcept
{
    return mode == InterferenceMode::CrossGain ? "cross_gain" : "verbatim";
}

InterferenceMode parse_interference_mode(std::string_view name)
{
    if (name == "cross_gain") {
        return InterferenceMode::CrossGain;
    }
    if (name == "verbatim") {
        return InterferenceMode::Verbatim;
    }
    throw PowerControlError("unknown interference mode '" + std::string(name) + "'");
}

PowerControlInstance::PowerControlInstance(std::size_t users, std::size_t stations, std::size_t rbgs,
                                           std::vector<double> gain, double noise_power,
                                           std::vector<double> max_power, std::vector<std::uint8_t> association)
    : users_(users), stations_(stations), rbgs_(rbgs), gain_(std::move(gain)), noise_power_(noise_power),
      max_power_(std::move(max_power)), association_(std::move(association))
{
    if (association_.empty()) {
        association_.assign(size(), 0);
    }
    validate();
}

void PowerControlInstance::validate() const
{
    if (users_ == 0 || stations_ == 0 || rbgs_ == 0) {
        throw PowerControlError("instance dimensions must be positive");
    }
    if (gain_.size() != size()) {
        throw PowerControlError("gain tensor has " + std::to_string(gain_.size()) + " entries, expected "
                                + std::to_string(size()));
    }
    for (double g : gain_) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw PowerControlError("every gain must be finite and positive");
        }
    }
    if (!(noise_power_ > 0.0) || !std::isfinite(noise_power_)) {
        throw PowerControlError("noise power must be positive");
    }
    if (max_power_.size() != stations_) {
        throw PowerControlError("max_power needs one entry per station");
    }
    for (double g : max_power_) {
        if (!(g > 0.0) || !std::isfinite(g)) {
            throw PowerControlError("every station budget must be positive");
        }
    }
    if (association_.size() != size()) {
        throw PowerControlError("association mask size mismatch");
    }
    for (std::size_t m = 0; m < users_; ++m) {
        for (std::size_t b = 0; b < rbgs_; ++b) {
            int served = 0;
            for (std::size_t n = 0; n < stations_; ++n) {
                const auto v = association_[index(m, n, b)];
                if (v > 1) {
                    throw PowerControlError("association entries must be 0 or 1");
                }
                served += v;
            }
            if (served > 1) {
                throw PowerControlError("user " + std::to_string(m) + " on RBG " + std::to_string(b)
                                        + " is associated with more than one station");
            }
        }
    }
}

bool PowerControlInstance::has_association() const noexcept
{
    for (auto v : association_) {
        if (v != 0) {
            return true;
        }
    }
    return false;
}

PowerControlInstance PowerControlInstance::with_association(std::vector<std::uint8_t> association) const
{
    return PowerControlInstance(users_, stations_, rbgs_, gain_, noise_power_, max_power_,
                                std::move(association));
}

PowerControlInstance PowerControlInstance::scaled(double factor) const
{
    auto g = gain_;
    for (auto& x : g) {
        x *= factor;
    }
    return PowerControlInstance(users_, stations_, rbgs_, std::move(g), noise_power_ * factor, max_power_,
                                association_);
}

std::vector<Triple> PowerControlInstance::triples() const
{
    std::vector<Triple> out;
    for (std::size_t m = 0; m < users_; ++m) {
        for (std::size_t n = 0; n < stations_; ++n) {
            for (std::size_t b = 0; b < rbgs_; ++b) {
                if (associated(m, n, b)) {
                    out.push_back({m, n, b});
                }
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> greedy_associate(const PowerControlInstance& inst)
{
    std::vector<std::uint8_t> mask(inst.size(), 0);
    for (std::size_t m = 0; m < inst.users(); ++m) {
        for (std::size_t b = 0; b < inst.rbgs(); ++b) {
            std::size_t best = 0;
            for (std::size_t n = 1; n < inst.stations(); ++n) {
                if (inst.gain(m, n, b) > inst.gain(m, best, b)) {
                    best = n;
                }
            }
            mask[inst.index(m, best, b)] = 1;
        }
    }
    return mask;
}

PowerControlInstance random_instance(std::size_t users, std::size_t stations, std::size_t rbgs,
                                     std::uint64_t seed, const RandomInstanceOptions& opts)
{
    RandomStream rng(derive_seed(seed, "powerctl-instance"));
    std::vector<double> gain(users * stations * rbgs);
    for (auto& g : gain) {
        g = std::pow(10.0, rng.uniform(opts.gain_lo_db, opts.gain_hi_db) / 10.0);
    }
    PowerControlInstance inst(users, stations, rbgs, std::move(gain), opts.noise_power,
                              std::vector<double>(stations, opts.max_power));
    return inst.with_association(greedy_associate(inst));
}

}  // namespace ntn::powerctl
