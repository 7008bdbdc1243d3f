#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ert/core.hpp"
#include "ert/strategy.hpp"

namespace ert {

enum class State : std::uint8_t { Ward = 1, ICU = 2, Home = 3, Dead = 4 };

inline constexpr std::size_t kStateCount = 4;
inline constexpr std::size_t state_index(State s) { return static_cast<std::size_t>(s) - 1; }
State state_from_index(std::size_t idx);
std::string_view state_name(State s);
/// Accepts "ward", "icu", "home", "dead" (any case) or "1".."4".
State parse_state(std::string_view text);

using Transition = std::pair<State, State>;

struct StateModel {
  std::set<State> absorbing{State::Home, State::Dead};
  std::set<Transition> good{{State::ICU, State::Ward}, {State::Ward, State::Home}};

  void validate() const;
};

enum class TransitionClass { Good, Bad };

/// Throws DataError("not a transition") when from == to.
TransitionClass classify(State from, State to, const StateModel& model = {});

/// Daily transition probabilities, rows indexed by the from-state.
class TransitionMatrix {
 public:
  using Row = std::array<double, kStateCount>;

  explicit TransitionMatrix(const std::array<Row, kStateCount>& rows, const StateModel& model = {});

  const Row& row(State from) const { return rows_[state_index(from)]; }
  const std::array<Row, kStateCount>& rows() const { return rows_; }

  static TransitionMatrix reference_control();
  static TransitionMatrix reference_treatment();
  static TransitionMatrix identity();

  /// Distribution over states after `days` steps starting from `start`.
  std::array<double, kStateCount> distribution_after(State start, int days) const;

 private:
  std::array<Row, kStateCount> rows_;
};

struct PatientTransition {
  State from = State::ICU;
  State to = State::ICU;
  int day = 0;
};

struct PatientPath {
  State final_state = State::ICU;
  std::vector<PatientTransition> transitions;
};

/// One categorical draw per day; only state changes are recorded; stops at an absorbing state.
PatientPath simulate_patient_path(const TransitionMatrix& matrix, State start, int horizon, std::mt19937_64& rng,
                                  const StateModel& model = {});

struct MultistateConfig {
  RampSchedule ramp{30, 50};
  double alpha = 0.05;
  StateModel model{};
  BettingStrategy strategy = BettingStrategy::half_kelly();

  void validate() const;
};

inline constexpr double kMultistateWagerFloor = 0.01;
inline constexpr double kMultistateWagerCeiling = 0.99;

struct TransitionCounts {
  std::int64_t good_trt = 0;
  std::int64_t total_trt = 0;
  std::int64_t good_ctrl = 0;
  std::int64_t total_ctrl = 0;
  std::int64_t total() const { return total_trt + total_ctrl; }
};

/// Good-transition rate in treatment minus control (0 unless both arms have a transition).
double good_rate_delta(const TransitionCounts& counts);

double multistate_wager(const TransitionCounts& counts, TransitionClass cls, std::int64_t i, const MultistateConfig& cfg);

/// Streaming e-RTms: one bet per transition at p = 0.5.
class MultistateMonitor {
 public:
  explicit MultistateMonitor(MultistateConfig cfg = {}, bool keep_history = true);
  MultistateMonitor(MultistateConfig cfg, TransitionCounts counts, WealthLedger ledger);

  const WealthStep& step(State from, State to, Arm arm);

  std::int64_t next_index() const { return counts_.total() + 1; }
  const MultistateConfig& config() const { return cfg_; }
  const TransitionCounts& counts() const { return counts_; }
  const WealthLedger& ledger() const { return ledger_; }

 private:
  MultistateConfig cfg_;
  TransitionCounts counts_;
  WealthLedger ledger_;
};

struct ArmTransition {
  PatientTransition transition;
  Arm arm = Arm::Control;
};

/// Stable sort by day (arrival order breaks ties).
std::vector<ArmTransition> order_transitions(std::span<const ArmTransition> transitions);

}  // namespace ert
