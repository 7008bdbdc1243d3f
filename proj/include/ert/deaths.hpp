#pragma once

#include <cstdint>
#include <vector>

#include "ert/core.hpp"
#include "ert/strategy.hpp"

namespace ert {

/// Probability that a death came from the treatment arm under 1:1 allocation.
double death_coin(double p_ctrl, double p_trt);

/// ceil(n/2 * (p_ctrl + p_trt)), 1:1 allocation.
std::int64_t expected_deaths(std::int64_t n_patients, double p_ctrl, double p_trt);

/// Deaths-only design size: ceil(inflation * frequentist N).
std::int64_t deaths_design_size(std::int64_t n_frequentist, double inflation = 2.5);

struct SignalRow {
  double baseline = 0.0;
  double treatment_rate = 0.0;
  double coin = 0.5;
  double tilt = 0.0;            // |coin - 0.5|
  double tilt_over_arr = 0.0;   // 0 when arr == 0
};

std::vector<SignalRow> signal_concentration_table(const std::vector<double>& baselines, double arr);

struct DeathsConfig {
  RampSchedule ramp{30, 50};
  double alpha = 0.05;
  BettingStrategy strategy = BettingStrategy::full_kelly();

  void validate() const;
};

struct DeathCounts {
  std::int64_t d_trt = 0;
  std::int64_t d_ctrl = 0;
  std::int64_t total() const { return d_trt + d_ctrl; }
};

/// Running share of deaths from treatment (0.5 before the first death).
double deaths_p_hat(const DeathCounts& counts);

/// p̂/(1-p̂) with 0 / infinity outside (0.001, 0.999).
double deaths_relative_risk(const DeathCounts& counts);

/// Wager on "treatment death" for death number `i` (1-based).
double deaths_wager(const DeathCounts& counts, std::int64_t i, const DeathsConfig& cfg);

/// Streaming e-RTd over the arm labels of deaths in arrival order.
class DeathsMonitor {
 public:
  explicit DeathsMonitor(DeathsConfig cfg = {}, bool keep_history = true);
  DeathsMonitor(DeathsConfig cfg, DeathCounts counts, WealthLedger ledger);

  const WealthStep& step(Arm arm);

  std::int64_t next_index() const { return counts_.total() + 1; }
  double p_hat() const { return deaths_p_hat(counts_); }
  double relative_risk() const { return deaths_relative_risk(counts_); }

  const DeathsConfig& config() const { return cfg_; }
  const DeathCounts& counts() const { return counts_; }
  const WealthLedger& ledger() const { return ledger_; }

 private:
  DeathsConfig cfg_;
  DeathCounts counts_;
  WealthLedger ledger_;
};

}  // namespace ert
