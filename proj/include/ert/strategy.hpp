#pragma once

#include <string>
#include <string_view>

namespace ert {

/// Wager-sizing policy. Every policy is predictable: it only sees data from
/// observations already revealed, plus the current outcome where the variant
/// allows it.
///
/// Which kinds a variant accepts:
///   binary, multistate : half-kelly (native), full-kelly, fixed
///   deaths             : full-kelly (native), half-kelly, fixed
///   continuous         : doubly-adaptive (native), sign-only
///   survival           : fixed (native, 0.25), half-kelly, full-kelly
enum class StrategyKind {
  AdaptiveHalfKelly,
  AdaptiveFullKelly,
  Fixed,
  SignOnly,
  DoublyAdaptive,
};

struct BettingStrategy {
  StrategyKind kind = StrategyKind::AdaptiveHalfKelly;
  double param = 0.0;  // λ for fixed, c for sign-only; unused otherwise

  static BettingStrategy half_kelly() { return {StrategyKind::AdaptiveHalfKelly, 0.0}; }
  static BettingStrategy full_kelly() { return {StrategyKind::AdaptiveFullKelly, 0.0}; }
  static BettingStrategy fixed(double lambda);
  static BettingStrategy sign_only(double c);
  static BettingStrategy doubly_adaptive() { return {StrategyKind::DoublyAdaptive, 0.0}; }

  /// Parses "half-kelly", "full-kelly", "fixed:0.25", "sign-only:0.6", "doubly-adaptive".
  static BettingStrategy parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const BettingStrategy&, const BettingStrategy&) = default;
};

/// -1, 0 or +1.
inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace ert
