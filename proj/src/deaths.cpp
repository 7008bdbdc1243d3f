#include "ert/deaths.hpp"

#include <cmath>
#include <limits>

namespace ert {

double death_coin(double p_ctrl, double p_trt) {
  if (!(p_ctrl >= 0.0 && p_ctrl <= 1.0 && p_trt >= 0.0 && p_trt <= 1.0)) {
    throw ConfigError("mortality rates must lie in [0,1]");
  }
  if (p_ctrl + p_trt <= 0.0) throw ConfigError("no deaths possible");
  return p_trt / (p_trt + p_ctrl);
}

std::int64_t expected_deaths(std::int64_t n_patients, double p_ctrl, double p_trt) {
  if (n_patients < 0) throw ConfigError("n_patients must be >= 0");
  const double expected = static_cast<double>(n_patients) / 2.0 * (p_ctrl + p_trt);
  // Guard against 500.0000000001-style products rounding up a whole count.
  return static_cast<std::int64_t>(std::ceil(expected - 1e-9));
}

std::int64_t deaths_design_size(std::int64_t n_frequentist, double inflation) {
  if (n_frequentist < 0 || !(inflation > 0.0)) throw ConfigError("invalid design inflation");
  return static_cast<std::int64_t>(std::ceil(static_cast<double>(n_frequentist) * inflation - 1e-9));
}

std::vector<SignalRow> signal_concentration_table(const std::vector<double>& baselines, double arr) {
  std::vector<SignalRow> rows;
  rows.reserve(baselines.size());
  for (double b : baselines) {
    const double trt = b - arr;
    if (trt < -1e-12) throw ConfigError("treatment mortality would be negative");
    SignalRow row;
    row.baseline = b;
    row.treatment_rate = std::max(0.0, trt);
    row.coin = death_coin(b, row.treatment_rate);
    row.tilt = std::abs(row.coin - 0.5);
    row.tilt_over_arr = arr != 0.0 ? row.tilt / std::abs(arr) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void DeathsConfig::validate() const {
  validate_alpha(alpha);
  switch (strategy.kind) {
    case StrategyKind::AdaptiveHalfKelly:
    case StrategyKind::AdaptiveFullKelly:
    case StrategyKind::Fixed:
      return;
    default:
      throw ConfigError("e-RTd does not support strategy " + strategy.to_string());
  }
}

double deaths_p_hat(const DeathCounts& counts) {
  return counts.total() > 0 ? static_cast<double>(counts.d_trt) / static_cast<double>(counts.total()) : 0.5;
}

double deaths_relative_risk(const DeathCounts& counts) {
  const double p = deaths_p_hat(counts);
  if (p > 0.001 && p < 0.999) return p / (1.0 - p);
  return p <= 0.001 ? 0.0 : std::numeric_limits<double>::infinity();
}

double deaths_wager(const DeathCounts& counts, std::int64_t i, const DeathsConfig& cfg) {
  if (i <= cfg.ramp.burn_in || counts.total() == 0) return 0.5;
  const double c = ramp_coefficient(i, cfg.ramp);
  const double tilt = deaths_p_hat(counts) - 0.5;
  double dev = 0.0;
  switch (cfg.strategy.kind) {
    case StrategyKind::AdaptiveHalfKelly: dev = 0.5 * c * tilt; break;
    case StrategyKind::Fixed: dev = c * cfg.strategy.param * sign_of(tilt); break;
    default: dev = c * tilt; break;
  }
  return clamp_lambda(0.5 + dev);
}

DeathsMonitor::DeathsMonitor(DeathsConfig cfg, bool keep_history) : cfg_(cfg), ledger_(cfg.alpha, keep_history) {
  cfg_.validate();
}

DeathsMonitor::DeathsMonitor(DeathsConfig cfg, DeathCounts counts, WealthLedger ledger)
    : cfg_(cfg), counts_(counts), ledger_(std::move(ledger)) {
  cfg_.validate();
}

const WealthStep& DeathsMonitor::step(Arm arm) {
  const double lambda = deaths_wager(counts_, next_index(), cfg_);
  const WealthStep& s = apply_bet(ledger_, lambda, arm, 0.5);
  if (arm == Arm::Treatment) {
    ++counts_.d_trt;
  } else {
    ++counts_.d_ctrl;
  }
  return s;
}

}  // namespace ert
