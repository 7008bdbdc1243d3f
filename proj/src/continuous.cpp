#include "ert/continuous.hpp"

#include <algorithm>
#include <cmath>

namespace ert {

namespace {

double fallback_scale(double mad) { return (std::isfinite(mad) && mad > 0.0) ? mad : 1.0; }

}  // namespace

double squash(double r) {
  if (!std::isfinite(r)) throw DataError("residual must be finite");
  return r / (1.0 + std::abs(r));
}

void OrderedHistory::insert(double y) {
  if (!std::isfinite(y)) throw DataError("outcome must be finite");
  sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), y), y);
}

double OrderedHistory::median() const {
  if (sorted_.empty()) throw DataError("insufficient history");
  const std::size_t n = sorted_.size();
  if (n % 2 == 1) return sorted_[n / 2];
  return (sorted_[n / 2 - 1] + sorted_[n / 2]) / 2.0;
}

double OrderedHistory::mad(double center) const {
  if (sorted_.empty()) throw DataError("insufficient history");
  const std::size_t n = sorted_.size();
  // |x - center| is ascending walking outwards from the split point on each
  // side; merge the two runs until both middle order statistics are reached.
  auto right = static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), center) - sorted_.begin());
  std::size_t left = right;  // next left candidate is sorted_[left - 1]
  const std::size_t lo_rank = (n - 1) / 2;
  const std::size_t hi_rank = n / 2;
  double lo_val = 0.0;
  double hi_val = 0.0;
  for (std::size_t rank = 0; rank <= hi_rank; ++rank) {
    double d = 0.0;
    const bool take_left = left > 0 && (right >= n || std::abs(sorted_[left - 1] - center) <= std::abs(sorted_[right] - center));
    if (take_left) {
      d = std::abs(sorted_[left - 1] - center);
      --left;
    } else {
      d = std::abs(sorted_[right] - center);
      ++right;
    }
    if (rank == lo_rank) lo_val = d;
    if (rank == hi_rank) hi_val = d;
  }
  return n % 2 == 1 ? lo_val : (lo_val + hi_val) / 2.0;
}

CenterScale OrderedHistory::center_scale() const {
  const double m = median();
  return {m, fallback_scale(mad(m))};
}

CenterScale robust_center_scale(std::span<const double> values) {
  if (values.empty()) throw DataError("insufficient history");
  OrderedHistory h;
  for (double v : values) h.insert(v);
  return h.center_scale();
}

void ArmMoments::add(double y) {
  ++n;
  const double d = y - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (y - mean);
}

double ArmMoments::sd_or_unit() const {
  if (n < 2) return 1.0;
  const double sd = std::sqrt(std::max(0.0, m2) / static_cast<double>(n - 1));
  return sd > 0.0 ? sd : 1.0;
}

double running_cohens_d(const ArmMoments& trt, const ArmMoments& ctrl) {
  if (trt.n == 0 || ctrl.n == 0) return 0.0;
  const double s_trt = trt.sd_or_unit();
  const double s_ctrl = ctrl.sd_or_unit();
  const double pooled = std::sqrt((s_trt * s_trt + s_ctrl * s_ctrl) / 2.0);
  return std::clamp((trt.mean - ctrl.mean) / pooled, -1.0, 1.0);
}

void ContinuousConfig::validate() const {
  validate_allocation(p);
  validate_alpha(alpha);
  if (!(c_max > 0.0 && c_max < 1.0)) throw ConfigError("c_max must lie in (0,1)");
  if (strategy.kind != StrategyKind::DoublyAdaptive && strategy.kind != StrategyKind::SignOnly) {
    throw ConfigError("e-RTc does not support strategy " + strategy.to_string());
  }
}

ContinuousMonitor::ContinuousMonitor(ContinuousConfig cfg, bool keep_history)
    : cfg_(cfg), ledger_(cfg.alpha, keep_history) {
  cfg_.validate();
}

ContinuousMonitor::ContinuousMonitor(ContinuousConfig cfg, std::span<const Observation> past, WealthLedger ledger)
    : cfg_(cfg), ledger_(std::move(ledger)) {
  cfg_.validate();
  for (const auto& o : past) absorb(o.y, o.arm);
}

bool ContinuousMonitor::next_is_gated() const {
  const auto history = static_cast<std::int64_t>(past_.size());
  return history == 0 || history < cfg_.ramp.burn_in;
}

double ContinuousMonitor::squashed_residual(double y) const {
  const CenterScale cs = ordered_.center_scale();
  return squash((y - cs.median) / cs.scale);
}

double ContinuousMonitor::next_wager(double y) const {
  if (!std::isfinite(y)) throw DataError("outcome must be finite");
  if (next_is_gated()) return 0.5;
  const double g = squashed_residual(y);
  const double c = ramp_coefficient(next_index(), cfg_.ramp);
  const double d = cohens_d();
  const double raw = cfg_.strategy.kind == StrategyKind::SignOnly ? 0.5 + c * cfg_.strategy.param * g * sign_of(d)
                                                                  : 0.5 + c * cfg_.c_max * g * d;
  return clamp_lambda(raw);
}

const WealthStep& ContinuousMonitor::step(double y, Arm arm) {
  if (!std::isfinite(y)) throw DataError("outcome must be finite");
  const WealthStep* s = nullptr;
  if (next_is_gated()) {
    s = &ledger_.record(0.5, 1.0);
  } else {
    s = &apply_bet(ledger_, next_wager(y), arm, cfg_.p);
  }
  absorb(y, arm);
  return *s;
}

void ContinuousMonitor::absorb(double y, Arm arm) {
  ordered_.insert(y);
  past_.push_back({y, arm});
  (arm == Arm::Treatment ? trt_ : ctrl_).add(y);
}

}  // namespace ert
