#include "ert/binary.hpp"

namespace ert {

namespace {

void check_outcome(int outcome) {
  if (outcome != 0 && outcome != 1) throw DataError("outcome must be 0 or 1");
}

}  // namespace

void BinaryCounts::add(int outcome, Arm arm) {
  check_outcome(outcome);
  if (arm == Arm::Treatment) {
    ++n_trt;
    e_trt += outcome;
  } else {
    ++n_ctrl;
    e_ctrl += outcome;
  }
}

void BinaryConfig::validate() const {
  validate_allocation(p);
  validate_alpha(alpha);
  switch (strategy.kind) {
    case StrategyKind::AdaptiveHalfKelly:
    case StrategyKind::AdaptiveFullKelly:
    case StrategyKind::Fixed:
      return;
    default:
      throw ConfigError("binary e-RT does not support strategy " + strategy.to_string());
  }
}

double binary_delta(const BinaryCounts& counts) {
  const double rate_trt = counts.n_trt > 0 ? static_cast<double>(counts.e_trt) / static_cast<double>(counts.n_trt) : 0.5;
  const double rate_ctrl =
      counts.n_ctrl > 0 ? static_cast<double>(counts.e_ctrl) / static_cast<double>(counts.n_ctrl) : 0.5;
  return rate_trt - rate_ctrl;
}

double binary_wager(const BinaryCounts& counts, int outcome, std::int64_t i, const BinaryConfig& cfg) {
  check_outcome(outcome);
  const double delta = binary_delta(counts);
  const double c = ramp_coefficient(i, cfg.ramp);
  double dev = 0.0;
  switch (cfg.strategy.kind) {
    case StrategyKind::AdaptiveFullKelly: dev = c * delta; break;
    case StrategyKind::Fixed: dev = c * cfg.strategy.param * sign_of(delta); break;
    default: dev = 0.5 * c * delta; break;
  }
  return clamp_lambda(outcome == 1 ? 0.5 + dev : 0.5 - dev);
}

BinaryMonitor::BinaryMonitor(BinaryConfig cfg, bool keep_history)
    : cfg_(cfg), ledger_(cfg.alpha, keep_history) {
  cfg_.validate();
}

BinaryMonitor::BinaryMonitor(BinaryConfig cfg, BinaryCounts counts, WealthLedger ledger)
    : cfg_(cfg), counts_(counts), ledger_(std::move(ledger)) {
  cfg_.validate();
}

const WealthStep& BinaryMonitor::step(int outcome, Arm arm) {
  check_outcome(outcome);
  const std::int64_t i = next_index();
  const WealthStep* s = nullptr;
  if (i == 1) {
    s = &ledger_.record(cfg_.p, 1.0);
  } else {
    s = &apply_bet(ledger_, binary_wager(counts_, outcome, i, cfg_), arm, cfg_.p);
  }
  counts_.add(outcome, arm);
  return *s;
}

}  // namespace ert
