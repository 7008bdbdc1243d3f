#include "ert/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ert {

double risk_proportion(std::int64_t risk_trt, std::int64_t risk_ctrl) {
  const std::int64_t total = risk_trt + risk_ctrl;
  return total > 0 ? static_cast<double>(risk_trt) / static_cast<double>(total) : 0.5;
}

double score_increment(Arm event_arm, double p) { return (event_arm == Arm::Treatment ? 1.0 : 0.0) - p; }

std::vector<SurvivalRecord> order_records(std::span<const SurvivalRecord> records,
                                          std::optional<std::span<const double>> entry_times) {
  if (entry_times && entry_times->size() != records.size()) {
    throw DataError("entry_times must match records in length");
  }
  std::vector<SurvivalRecord> out(records.begin(), records.end());
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (entry_times) out[k].time = records[k].time - (*entry_times)[k];
    if (!(out[k].time >= 0.0) || !std::isfinite(out[k].time)) throw DataError("negative study time");
  }
  std::stable_sort(out.begin(), out.end(), [](const SurvivalRecord& a, const SurvivalRecord& b) { return a.time < b.time; });
  return out;
}

void SurvivalConfig::validate() const {
  validate_alpha(alpha);
  switch (strategy.kind) {
    case StrategyKind::Fixed:
    case StrategyKind::AdaptiveHalfKelly:
    case StrategyKind::AdaptiveFullKelly:
      return;
    default:
      throw ConfigError("e-RTs does not support strategy " + strategy.to_string());
  }
}

double survival_bet(const SurvivalScore& score, std::int64_t j, const SurvivalConfig& cfg) {
  if (j <= cfg.ramp.burn_in) return 0.0;
  const double c = ramp_coefficient(j, cfg.ramp);
  switch (cfg.strategy.kind) {
    case StrategyKind::AdaptiveHalfKelly:
    case StrategyKind::AdaptiveFullKelly: {
      if (score.cum_v <= 0.0) return 0.0;
      const double k = cfg.strategy.kind == StrategyKind::AdaptiveHalfKelly ? 0.5 : 1.0;
      const double log_hr = score.cum_z / score.cum_v;
      return c * std::clamp(k * log_hr, -kSurvivalAdaptiveCap, kSurvivalAdaptiveCap);
    }
    default:
      return c * cfg.strategy.param * sign_of(score.cum_z);
  }
}

SurvivalMonitor::SurvivalMonitor(SurvivalConfig cfg, std::int64_t n_trt, std::int64_t n_ctrl, bool keep_history)
    : cfg_(cfg), ledger_(cfg.alpha, keep_history) {
  cfg_.validate();
  if (n_trt < 0 || n_ctrl < 0) throw ConfigError("risk set sizes must be >= 0");
  score_.risk_trt = n_trt;
  score_.risk_ctrl = n_ctrl;
}

SurvivalMonitor::SurvivalMonitor(SurvivalConfig cfg, SurvivalScore score, WealthLedger ledger)
    : cfg_(cfg), score_(score), ledger_(std::move(ledger)) {
  cfg_.validate();
}

const WealthStep& SurvivalMonitor::step(const SurvivalRecord& record) {
  if (!(record.time >= 0.0) || !std::isfinite(record.time)) throw DataError("negative study time");
  if (record.status != 0 && record.status != 1) throw DataError("status must be 0 or 1");
  if (score_.processed > 0 && record.time < score_.last_time) throw DataError("stream not sorted");
  std::int64_t& risk = record.arm == Arm::Treatment ? score_.risk_trt : score_.risk_ctrl;
  if (risk <= 0) throw DataError("risk set exhausted for arm " + std::to_string(to_int(record.arm)));

  const double b = survival_bet(score_, next_index(), cfg_);
  const WealthStep* s = nullptr;
  if (record.status == 1) {
    const double p = risk_share();
    const double u = score_increment(record.arm, p);
    s = &ledger_.record(b, 1.0 + b * u);
    score_.cum_z += u;
    score_.cum_v += p * (1.0 - p);
  } else {
    s = &ledger_.record(b, 1.0);
  }
  --risk;
  ++score_.processed;
  score_.last_time = record.time;
  return *s;
}

}  // namespace ert
