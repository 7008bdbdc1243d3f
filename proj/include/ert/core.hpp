#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ert {

/// Invalid configuration (allocation probability, ramp, alpha, strategy parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or out-of-contract observation data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Arm : std::uint8_t { Control = 0, Treatment = 1 };

inline constexpr int to_int(Arm a) { return a == Arm::Treatment ? 1 : 0; }
Arm arm_from_int(long long v);
inline constexpr Arm flip(Arm a) { return a == Arm::Treatment ? Arm::Control : Arm::Treatment; }

/// Burn-in then linear ramp of betting strength.
///
/// c(i) = min(1, max(0, (i - burn_in) / ramp)); zero through the burn-in and
/// one from burn_in + ramp onwards.
struct RampSchedule {
  std::int64_t burn_in = 0;
  std::int64_t ramp = 1;

  RampSchedule() = default;
  RampSchedule(std::int64_t burn_in_, std::int64_t ramp_);

  friend bool operator==(const RampSchedule&, const RampSchedule&) = default;
};

double ramp_coefficient(std::int64_t i, const RampSchedule& sched);

inline constexpr double kWagerFloor = 0.001;
inline constexpr double kWagerCeiling = 0.999;

/// Clamp a raw wager into [lo, hi]; throws ConfigError("invalid wager") on non-finite input.
double clamp_lambda(double raw, double lo = kWagerFloor, double hi = kWagerCeiling);

/// Expected multiplier of a two-sided wager under the null: p*(λ/p) + (1-p)*((1-λ)/(1-p)).
/// Self-test only.
double martingale_audit(double lambda, double p);

/// Multiplier paid by a two-sided wager once the arm is revealed.
double two_sided_multiplier(double lambda, Arm arm, double p);

struct WealthStep {
  std::int64_t index = 0;
  double lambda = 0.5;  // wager, or the signed bet b for score-based variants
  double multiplier = 1.0;
  double log_wealth = 0.0;
  bool crossed = false;

  double wealth() const;
};

/// Multiplicative wealth process with rejection threshold 1/alpha.
///
/// Wealth is tracked in log space; the crossing flag latches at the first
/// index with log W >= log(1/alpha). Full step history is optional so that
/// Monte Carlo runs do not allocate per observation.
class WealthLedger {
 public:
  struct Snapshot {
    double alpha = 0.05;
    std::int64_t count = 0;
    double log_wealth = 0.0;
    double max_log_wealth = 0.0;
    std::optional<std::int64_t> crossed_at;
    std::optional<WealthStep> last;
  };

  explicit WealthLedger(double alpha = 0.05, bool keep_history = true);

  static WealthLedger restore(const Snapshot& snap, bool keep_history = true);
  Snapshot snapshot() const;

  /// Append one step with the given multiplier (must be > 0).
  const WealthStep& record(double lambda, double multiplier);

  double alpha() const { return alpha_; }
  double threshold() const { return 1.0 / alpha_; }
  double log_threshold() const { return log_threshold_; }

  std::int64_t size() const { return count_; }
  double log_wealth() const { return log_wealth_; }
  double wealth() const;
  double max_log_wealth() const { return max_log_wealth_; }
  bool crossed() const { return crossed_at_.has_value(); }
  std::optional<std::int64_t> crossed_at() const { return crossed_at_; }
  const std::optional<WealthStep>& last() const { return last_; }

  bool keeps_history() const { return keep_history_; }
  const std::vector<WealthStep>& steps() const { return steps_; }

 private:
  double alpha_;
  double log_threshold_;
  bool keep_history_;
  std::int64_t count_ = 0;
  double log_wealth_ = 0.0;
  double max_log_wealth_ = 0.0;
  std::optional<std::int64_t> crossed_at_;
  std::optional<WealthStep> last_;
  std::vector<WealthStep> steps_;
};

/// Two-sided bet: multiplier λ/p on treatment, (1-λ)/(1-p) on control.
const WealthStep& apply_bet(WealthLedger& ledger, double lambda, Arm arm, double p);

void validate_allocation(double p);
void validate_alpha(double alpha);

}  // namespace ert
