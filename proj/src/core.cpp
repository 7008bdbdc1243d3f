#include "ert/core.hpp"

#include <algorithm>
#include <cmath>

namespace ert {

Arm arm_from_int(long long v) {
  if (v == 0) return Arm::Control;
  if (v == 1) return Arm::Treatment;
  throw DataError("arm must be 0 or 1");
}

RampSchedule::RampSchedule(std::int64_t burn_in_, std::int64_t ramp_) : burn_in(burn_in_), ramp(ramp_) {
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (ramp < 1) throw ConfigError("ramp must be >= 1");
}

double ramp_coefficient(std::int64_t i, const RampSchedule& sched) {
  const double raw = static_cast<double>(i - sched.burn_in) / static_cast<double>(sched.ramp);
  return std::min(1.0, std::max(0.0, raw));
}

double clamp_lambda(double raw, double lo, double hi) {
  if (!std::isfinite(raw)) throw ConfigError("invalid wager");
  return std::min(hi, std::max(lo, raw));
}

double martingale_audit(double lambda, double p) {
  return p * (lambda / p) + (1.0 - p) * ((1.0 - lambda) / (1.0 - p));
}

void validate_allocation(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("allocation probability must lie in (0,1)");
}

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

double two_sided_multiplier(double lambda, Arm arm, double p) {
  validate_allocation(p);
  return arm == Arm::Treatment ? lambda / p : (1.0 - lambda) / (1.0 - p);
}

double WealthStep::wealth() const { return std::exp(log_wealth); }

WealthLedger::WealthLedger(double alpha, bool keep_history)
    : alpha_(alpha), log_threshold_(0.0), keep_history_(keep_history) {
  validate_alpha(alpha);
  log_threshold_ = std::log(1.0 / alpha_);
}

WealthLedger WealthLedger::restore(const Snapshot& snap, bool keep_history) {
  WealthLedger ledger(snap.alpha, keep_history);
  if (snap.count < 0) throw DataError("negative step count in snapshot");
  ledger.count_ = snap.count;
  ledger.log_wealth_ = snap.log_wealth;
  ledger.max_log_wealth_ = snap.max_log_wealth;
  ledger.crossed_at_ = snap.crossed_at;
  ledger.last_ = snap.last;
  if (keep_history && snap.last) ledger.steps_.push_back(*snap.last);
  return ledger;
}

WealthLedger::Snapshot WealthLedger::snapshot() const {
  return Snapshot{alpha_, count_, log_wealth_, max_log_wealth_, crossed_at_, last_};
}

double WealthLedger::wealth() const { return std::exp(log_wealth_); }

const WealthStep& WealthLedger::record(double lambda, double multiplier) {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw DataError("wealth multiplier must be positive and finite");
  }
  ++count_;
  // log(1) is exactly 0, so neutral steps leave log-wealth bit-identical.
  log_wealth_ += std::log(multiplier);
  max_log_wealth_ = std::max(max_log_wealth_, log_wealth_);
  if (!crossed_at_ && log_wealth_ >= log_threshold_) crossed_at_ = count_;
  last_ = WealthStep{count_, lambda, multiplier, log_wealth_, crossed_at_.has_value()};
  if (keep_history_) steps_.push_back(*last_);
  return *last_;
}

const WealthStep& apply_bet(WealthLedger& ledger, double lambda, Arm arm, double p) {
  if (!std::isfinite(lambda) || lambda < 0.0 || lambda > 1.0) throw ConfigError("invalid wager");
  return ledger.record(lambda, two_sided_multiplier(lambda, arm, p));
}

}  // namespace ert
