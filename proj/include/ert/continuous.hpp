#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ert/core.hpp"
#include "ert/strategy.hpp"

namespace ert {

struct CenterScale {
  double median = 0.0;
  double scale = 1.0;  // raw MAD (constant 1); 1 when the MAD is zero or not finite
};

/// Median and raw MAD of `values`; throws DataError("insufficient history") when empty.
CenterScale robust_center_scale(std::span<const double> values);

/// r / (1 + |r|).
double squash(double r);

/// Values kept sorted so the median is O(1) and the MAD a linear merge walk.
class OrderedHistory {
 public:
  void insert(double y);
  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }
  double median() const;
  double mad(double center) const;
  CenterScale center_scale() const;

 private:
  std::vector<double> sorted_;
};

/// Welford accumulator for one arm.
struct ArmMoments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double y);
  /// Sample SD (n-1); 1 when undefined (n < 2) or zero.
  double sd_or_unit() const;
};

/// (mean_trt - mean_ctrl) / sqrt((sd_trt^2 + sd_ctrl^2)/2) clamped to [-1,1]; 0 if either arm is empty.
double running_cohens_d(const ArmMoments& trt, const ArmMoments& ctrl);

struct ContinuousConfig {
  double p = 0.5;
  RampSchedule ramp{50, 100};
  double c_max = 0.6;
  double alpha = 0.05;
  BettingStrategy strategy = BettingStrategy::doubly_adaptive();

  void validate() const;
};

/// Streaming e-RTc. No bet is placed while fewer than burn_in outcomes are
/// in the history (wealth carried forward).
class ContinuousMonitor {
 public:
  struct Observation {
    double y = 0.0;
    Arm arm = Arm::Control;
  };

  explicit ContinuousMonitor(ContinuousConfig cfg = {}, bool keep_history = true);
  /// Rebuilds the running statistics from `past`; the ledger is taken as-is.
  ContinuousMonitor(ContinuousConfig cfg, std::span<const Observation> past, WealthLedger ledger);

  /// Wager for the next observation if its outcome is y (0.5 while gated).
  double next_wager(double y) const;
  bool next_is_gated() const;
  double cohens_d() const { return running_cohens_d(trt_, ctrl_); }
  double squashed_residual(double y) const;

  const WealthStep& step(double y, Arm arm);

  std::int64_t next_index() const { return static_cast<std::int64_t>(past_.size()) + 1; }
  const ContinuousConfig& config() const { return cfg_; }
  const std::vector<Observation>& observations() const { return past_; }
  const WealthLedger& ledger() const { return ledger_; }

 private:
  void absorb(double y, Arm arm);

  ContinuousConfig cfg_;
  std::vector<Observation> past_;
  OrderedHistory ordered_;
  ArmMoments trt_;
  ArmMoments ctrl_;
  WealthLedger ledger_;
};

}  // namespace ert
