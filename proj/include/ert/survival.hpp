#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ert/core.hpp"
#include "ert/strategy.hpp"

namespace ert {

struct SurvivalRecord {
  double time = 0.0;  // time on study
  int status = 1;     // 1 = event, 0 = censored
  Arm arm = Arm::Control;
};

/// Treated share of the risk set; 0.5 for an empty risk set.
double risk_proportion(std::int64_t risk_trt, std::int64_t risk_ctrl);

/// Log-rank score increment X - p for an event from `event_arm`.
double score_increment(Arm event_arm, double p);

/// Stable sort by time on study. With entry times, `records[k].time` is the
/// calendar event time and the study time is time - entry. Throws on a negative study time.
std::vector<SurvivalRecord> order_records(std::span<const SurvivalRecord> records,
                                          std::optional<std::span<const double>> entry_times = std::nullopt);

struct SurvivalConfig {
  RampSchedule ramp{30, 50};
  double alpha = 0.05;
  /// fixed(λ_max) bets c_j·λ_max·sign(Z); the Kelly variants bet c_j·k·Z/V.
  BettingStrategy strategy = BettingStrategy::fixed(0.25);

  void validate() const;
};

inline constexpr double kSurvivalAdaptiveCap = 0.5;

struct SurvivalScore {
  std::int64_t risk_trt = 0;
  std::int64_t risk_ctrl = 0;
  double cum_z = 0.0;  // Σ U over processed events
  double cum_v = 0.0;  // Σ p(1-p) over processed events
  std::int64_t processed = 0;
  double last_time = 0.0;
};

/// Signed bet for record number `j` (1-based); 0 through the burn-in.
double survival_bet(const SurvivalScore& score, std::int64_t j, const SurvivalConfig& cfg);

/// Streaming e-RTs over records in nondecreasing time-on-study order.
/// Censored records shrink the risk set and leave wealth unchanged.
class SurvivalMonitor {
 public:
  SurvivalMonitor(SurvivalConfig cfg, std::int64_t n_trt, std::int64_t n_ctrl, bool keep_history = true);
  SurvivalMonitor(SurvivalConfig cfg, SurvivalScore score, WealthLedger ledger);

  const WealthStep& step(const SurvivalRecord& record);

  std::int64_t next_index() const { return score_.processed + 1; }
  double next_bet() const { return survival_bet(score_, next_index(), cfg_); }
  double risk_share() const { return risk_proportion(score_.risk_trt, score_.risk_ctrl); }

  const SurvivalConfig& config() const { return cfg_; }
  const SurvivalScore& score() const { return score_; }
  const WealthLedger& ledger() const { return ledger_; }

 private:
  SurvivalConfig cfg_;
  SurvivalScore score_;
  WealthLedger ledger_;
};

}  // namespace ert
