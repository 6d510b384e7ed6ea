#include "ntn/linkbudget.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ntn::linkbudget {

namespace {

void require_nonnegative(double value, const char* name)
{
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw LinkBudgetError(std::string("loss component ") + name + " must be a finite value >= 0");
    }
}

constexpr double kEirpPairTolerance = 1e-9;

}  // namespace

void PathLossBreakdown::validate() const
{
    require_nonnegative(fspl_db, "fspl_db");
    require_nonnegative(entry_db, "entry_db");
    require_nonnegative(atm_db, "atm_db");
    require_nonnegative(scint_db, "scint_db");
    require_nonnegative(shadow_db, "shadow_db");
    require_nonnegative(polarization_db, "polarization_db");
    require_nonnegative(misalignment_db, "misalignment_db");
}

void LinkBudgetParams::validate() const
{
    if (!(carrier_freq_ghz > 0.0)) {
        throw LinkBudgetError("carrier_freq_ghz must be positive");
    }
    if (!(bandwidth_hz > 0.0)) {
        throw LinkBudgetError("bandwidth_hz must be positive");
    }
    if (eirp_dbm && std::abs(*eirp_dbm - eirp_dbw - 30.0) > kEirpPairTolerance) {
        throw LinkBudgetError("eirp_dbm - eirp_dbw must equal 30 dB");
    }
    losses.validate();
}

std::string_view to_string(TerminalKind kind) noexcept
{
    switch (kind) {
    case TerminalKind::Smartphone:
        return "smartphone";
    case TerminalKind::Vsat:
        return "vsat";
    }
    return "unknown";
}

std::optional<TerminalKind> parse_terminal_kind(std::string_view name) noexcept
{
    if (name == "smartphone") {
        return TerminalKind::Smartphone;
    }
    if (name == "vsat") {
        return TerminalKind::Vsat;
    }
    return std::nullopt;
}

TerminalProfile TerminalProfile::reference_smartphone() noexcept
{
    return {TerminalKind::Smartphone, 23.0, 0.0, 0.0};
}

TerminalProfile TerminalProfile::reference_vsat() noexcept
{
    return {TerminalKind::Vsat, 33.0, 43.2, 39.7};
}

TerminalProfile TerminalProfile::reference_default(TerminalKind kind) noexcept
{
    return kind == TerminalKind::Vsat ? reference_vsat() : reference_smartphone();
}

double TerminalProfile::eirp_dbw() const noexcept
{
    return dbm_to_dbw(tx_power_dbm + tx_antenna_gain_dbi);
}

double dbm_to_dbw(double p_dbm) noexcept { return p_dbm - 30.0; }
double dbw_to_dbm(double p_dbw) noexcept { return p_dbw + 30.0; }
double db_to_linear(double x_db) noexcept { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double ratio)
{
    if (!(ratio > 0.0)) {
        throw LinkBudgetError("linear_to_db needs a positive ratio");
    }
    return 10.0 * std::log10(ratio);
}

double fspl_db(double freq_ghz, double distance_m)
{
    if (!(freq_ghz > 0.0) || !(distance_m > 0.0)) {
        throw LinkBudgetError("fspl_db needs positive frequency and distance");
    }
    return kFsplConstantDb + 20.0 * std::log10(distance_m) + 20.0 * std::log10(freq_ghz);
}

double total_path_loss_db(const PathLossBreakdown& losses)
{
    losses.validate();
    return losses.fspl_db + losses.entry_db + losses.atm_db + losses.scint_db + losses.shadow_db
         + losses.polarization_db + losses.misalignment_db;
}

double cn0_db_hz(double eirp_dbw, double figure_of_merit_db_per_k, double path_loss_db) noexcept
{
    return eirp_dbw + figure_of_merit_db_per_k - path_loss_db - kBoltzmannDbWPerKHz;
}

double snr_db_from_cn0(double cn0, double bandwidth_hz)
{
    if (!(bandwidth_hz > 0.0)) {
        throw LinkBudgetError("bandwidth must be positive");
    }
    return cn0 - 10.0 * std::log10(bandwidth_hz);
}

double shannon_capacity_bps(double bandwidth_hz, double snr_db)
{
    if (!(bandwidth_hz > 0.0)) {
        throw LinkBudgetError("bandwidth must be positive");
    }
    if (snr_db == -std::numeric_limits<double>::infinity()) {
        return 0.0;
    }
    return bandwidth_hz * std::log2(1.0 + db_to_linear(snr_db));
}

double effective_link_rate_bps(double capacity_bps, double share_factor)
{
    if (!(share_factor > 0.0 && share_factor <= 1.0)) {
        throw LinkBudgetError("share_factor must lie in (0, 1]");
    }
    return capacity_bps * share_factor;
}

LinkBudgetResult evaluate(const LinkBudgetParams& params)
{
    params.validate();
    LinkBudgetResult r;
    r.path_loss_db = total_path_loss_db(params.losses);
    r.cn0_db_hz = cn0_db_hz(params.eirp_dbw, params.figure_of_merit_db_per_k, r.path_loss_db);
    r.snr_db = snr_db_from_cn0(r.cn0_db_hz, params.bandwidth_hz);
    r.capacity_bps = shannon_capacity_bps(params.bandwidth_hz, r.snr_db);
    return r;
}

}  // namespace ntn::linkbudget
