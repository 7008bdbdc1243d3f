#pragma once

#include <cstdint>

#include "ert/core.hpp"
#include "ert/strategy.hpp"

namespace ert {

struct BinaryCounts {
  std::int64_t n_trt = 0;
  std::int64_t n_ctrl = 0;
  std::int64_t e_trt = 0;
  std::int64_t e_ctrl = 0;

  void add(int outcome, Arm arm);
  std::int64_t total() const { return n_trt + n_ctrl; }
};

struct BinaryConfig {
  double p = 0.5;
  RampSchedule ramp{50, 100};
  double alpha = 0.05;
  BettingStrategy strategy = BettingStrategy::half_kelly();

  void validate() const;
};

/// Event rate in treatment minus event rate in control; an empty arm counts as rate 0.5.
double binary_delta(const BinaryCounts& counts);

/// Wager on treatment for observation `i` (1-based) given its outcome and the
/// counts of observations 1..i-1.
double binary_wager(const BinaryCounts& counts, int outcome, std::int64_t i, const BinaryConfig& cfg);

/// Streaming binary e-RT: bet on the arm after seeing the outcome, then update counts.
/// Observation 1 places no bet.
class BinaryMonitor {
 public:
  explicit BinaryMonitor(BinaryConfig cfg = {}, bool keep_history = true);
  BinaryMonitor(BinaryConfig cfg, BinaryCounts counts, WealthLedger ledger);

  const WealthStep& step(int outcome, Arm arm);

  std::int64_t next_index() const { return counts_.total() + 1; }
  double delta() const { return binary_delta(counts_); }
  double next_wager(int outcome) const { return binary_wager(counts_, outcome, next_index(), cfg_); }

  const BinaryConfig& config() const { return cfg_; }
  const BinaryCounts& counts() const { return counts_; }
  const WealthLedger& ledger() const { return ledger_; }

 private:
  BinaryConfig cfg_;
  BinaryCounts counts_;
  WealthLedger ledger_;
};

}  // namespace ert
