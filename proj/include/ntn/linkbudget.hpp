#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

namespace ntn::linkbudget {

inline constexpr double kBoltzmannDbWPerKHz = -228.6;
inline constexpr double kFsplConstantDb = 32.45;

class LinkBudgetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Additive dB loss terms of an NTN hop. Entry, gaseous, and scintillation
/// losses are zero under clear-sky outdoor K-band conditions; shadowing,
/// polarization, and misalignment carry the extra terms of the parameter table.
struct PathLossBreakdown {
    double fspl_db = 0.0;
    double entry_db = 0.0;
    double atm_db = 0.0;
    double scint_db = 0.0;
    double shadow_db = 0.0;
    double polarization_db = 0.0;
    double misalignment_db = 0.0;

    void validate() const;
    bool operator==(const PathLossBreakdown&) const = default;
};

struct LinkBudgetParams {
    double carrier_freq_ghz = 0.0;
    double bandwidth_hz = 0.0;
    double eirp_dbw = 0.0;
    double figure_of_merit_db_per_k = 0.0;
    PathLossBreakdown losses;
    // When present, must equal eirp_dbw + 30.
    std::optional<double> eirp_dbm;

    void validate() const;
};

enum class TerminalKind { Smartphone, Vsat };

std::string_view to_string(TerminalKind kind) noexcept;
std::optional<TerminalKind> parse_terminal_kind(std::string_view name) noexcept;

struct TerminalProfile {
    TerminalKind kind = TerminalKind::Smartphone;
    double tx_power_dbm = 0.0;
    double tx_antenna_gain_dbi = 0.0;
    double rx_antenna_gain_dbi = 0.0;

    static TerminalProfile reference_smartphone() noexcept;
    static TerminalProfile reference_vsat() noexcept;
    static TerminalProfile reference_default(TerminalKind kind) noexcept;

    double eirp_dbw() const noexcept;
    bool operator==(const TerminalProfile&) const = default;
};

double dbm_to_dbw(double p_dbm) noexcept;
double dbw_to_dbm(double p_dbw) noexcept;
double db_to_linear(double x_db) noexcept;
double linear_to_db(double ratio);

/// 32.45 + 20 log10(r[m]) + 20 log10(f[GHz]).
double fspl_db(double freq_ghz, double distance_m);

double total_path_loss_db(const PathLossBreakdown& losses);

/// EIRP + G/T - L - k, with k = -228.6 dBW/K/Hz.
double cn0_db_hz(double eirp_dbw, double figure_of_merit_db_per_k, double path_loss_db) noexcept;

double snr_db_from_cn0(double cn0_db_hz, double bandwidth_hz);

/// B log2(1 + SNR). An SNR of -inf dB yields zero.
double shannon_capacity_bps(double bandwidth_hz, double snr_db);

/// Portion of a beam's capacity granted to one user.
double effective_link_rate_bps(double capacity_bps, double share_factor);

/// Full chain for one hop: losses -> C/N0 -> SNR -> capacity.
struct LinkBudgetResult {
    double path_loss_db = 0.0;
    double cn0_db_hz = 0.0;
    double snr_db = 0.0;
    double capacity_bps = 0.0;
};

LinkBudgetResult evaluate(const LinkBudgetParams& params);

}  // namespace ntn::linkbudget
