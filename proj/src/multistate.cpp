#include "ert/multistate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ert {

State state_from_index(std::size_t idx) {
  if (idx >= kStateCount) throw DataError("state index out of range");
  return static_cast<State>(idx + 1);
}

std::string_view state_name(State s) {
  switch (s) {
    case State::Ward: return "ward";
    case State::ICU: return "icu";
    case State::Home: return "home";
    case State::Dead: return "dead";
  }
  return "?";
}

State parse_state(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "ward" || lower == "1") return State::Ward;
  if (lower == "icu" || lower == "2") return State::ICU;
  if (lower == "home" || lower == "3") return State::Home;
  if (lower == "dead" || lower == "4") return State::Dead;
  throw DataError("unknown state: " + std::string(text));
}

void StateModel::validate() const {
  for (const auto& [from, to] : good) {
    if (from == to) throw ConfigError("good transitions may not be self-loops");
    if (absorbing.count(from)) throw ConfigError("absorbing states have no outgoing transitions");
  }
}

TransitionClass classify(State from, State to, const StateModel& model) {
  if (from == to) throw DataError("not a transition");
  return model.good.count({from, to}) ? TransitionClass::Good : TransitionClass::Bad;
}

TransitionMatrix::TransitionMatrix(const std::array<Row, kStateCount>& rows, const StateModel& model) : rows_(rows) {
  for (std::size_t r = 0; r < kStateCount; ++r) {
    double sum = 0.0;
    for (double v : rows_[r]) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("transition probabilities must lie in [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("transition matrix row does not sum to 1");
    if (model.absorbing.count(state_from_index(r)) && rows_[r][r] != 1.0) {
      throw ConfigError("absorbing state row must be the identity");
    }
  }
}

TransitionMatrix TransitionMatrix::reference_control() {
  return TransitionMatrix({{{0.880, 0.070, 0.030, 0.020},
                            {0.070, 0.915, 0.000, 0.015},
                            {0.000, 0.000, 1.000, 0.000},
                            {0.000, 0.000, 0.000, 1.000}}});
}

TransitionMatrix TransitionMatrix::reference_treatment() {
  return TransitionMatrix({{{0.870, 0.050, 0.050, 0.030},
                            {0.090, 0.900, 0.000, 0.010},
                            {0.000, 0.000, 1.000, 0.000},
                            {0.000, 0.000, 0.000, 1.000}}});
}

TransitionMatrix TransitionMatrix::identity() {
  std::array<Row, kStateCount> rows{};
  for (std::size_t r = 0; r < kStateCount; ++r) rows[r][r] = 1.0;
  return TransitionMatrix(rows);
}

std::array<double, kStateCount> TransitionMatrix::distribution_after(State start, int days) const {
  std::array<double, kStateCount> dist{};
  dist[state_index(start)] = 1.0;
  for (int d = 0; d < days; ++d) {
    std::array<double, kStateCount> next{};
    for (std::size_t from = 0; from < kStateCount; ++from) {
      for (std::size_t to = 0; to < kStateCount; ++to) next[to] += dist[from] * rows_[from][to];
    }
    dist = next;
  }
  return dist;
}

PatientPath simulate_patient_path(const TransitionMatrix& matrix, State start, int horizon, std::mt19937_64& rng,
                                  const StateModel& model) {
  if (horizon < 0) throw ConfigError("horizon must be >= 0");
  PatientPath path;
  State state = start;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int day = 1; day <= horizon; ++day) {
    if (model.absorbing.count(state)) break;
    const auto& row = matrix.row(state);
    const double u = unif(rng);
    double acc = 0.0;
    std::size_t next = kStateCount - 1;
    for (std::size_t k = 0; k < kStateCount; ++k) {
      acc += row[k];
      if (u < acc) {
        next = k;
        break;
      }
    }
    // Rounding can leave acc a hair under 1; fall back to the last state with mass.
    if (row[next] == 0.0) {
      for (std::size_t k = kStateCount; k-- > 0;) {
        if (row[k] > 0.0) {
          next = k;
          break;
        }
      }
    }
    const State to = state_from_index(next);
    if (to != state) path.transitions.push_back({state, to, day});
    state = to;
  }
  path.final_state = state;
  return path;
}

void MultistateConfig::validate() const {
  validate_alpha(alpha);
  model.validate();
  switch (strategy.kind) {
    case StrategyKind::AdaptiveHalfKelly:
    case StrategyKind::AdaptiveFullKelly:
    case StrategyKind::Fixed:
      return;
    default:
      throw ConfigError("e-RTms does not support strategy " + strategy.to_string());
  }
}

double good_rate_delta(const TransitionCounts& counts) {
  if (counts.total_trt == 0 || counts.total_ctrl == 0) return 0.0;
  return static_cast<double>(counts.good_trt) / static_cast<double>(counts.total_trt) -
         static_cast<double>(counts.good_ctrl) / static_cast<double>(counts.total_ctrl);
}

double multistate_wager(const TransitionCounts& counts, TransitionClass cls, std::int64_t i, const MultistateConfig& cfg) {
  double lambda = 0.5;
  if (i > cfg.ramp.burn_in && counts.total_trt > 0 && counts.total_ctrl > 0) {
    const double c = ramp_coefficient(i, cfg.ramp);
    const double delta = good_rate_delta(counts);
    double dev = 0.0;
    switch (cfg.strategy.kind) {
      case StrategyKind::AdaptiveFullKelly: dev = c * delta; break;
      case StrategyKind::Fixed: dev = c * cfg.strategy.param * sign_of(delta); break;
      default: dev = 0.5 * c * delta; break;
    }
    lambda = cls == TransitionClass::Good ? 0.5 + dev : 0.5 - dev;
  }
  return clamp_lambda(lambda, kMultistateWagerFloor, kMultistateWagerCeiling);
}

MultistateMonitor::MultistateMonitor(MultistateConfig cfg, bool keep_history)
    : cfg_(std::move(cfg)), ledger_(cfg_.alpha, keep_history) {
  cfg_.validate();
}

MultistateMonitor::MultistateMonitor(MultistateConfig cfg, TransitionCounts counts, WealthLedger ledger)
    : cfg_(std::move(cfg)), counts_(counts), ledger_(std::move(ledger)) {
  cfg_.validate();
}

const WealthStep& MultistateMonitor::step(State from, State to, Arm arm) {
  if (cfg_.model.absorbing.count(from)) throw DataError("transition out of an absorbing state");
  const TransitionClass cls = classify(from, to, cfg_.model);
  const WealthStep& s = apply_bet(ledger_, multistate_wager(counts_, cls, next_index(), cfg_), arm, 0.5);
  const std::int64_t good = cls == TransitionClass::Good ? 1 : 0;
  if (arm == Arm::Treatment) {
    ++counts_.total_trt;
    counts_.good_trt += good;
  } else {
    ++counts_.total_ctrl;
    counts_.good_ctrl += good;
  }
  return s;
}

std::vector<ArmTransition> order_transitions(std::span<const ArmTransition> transitions) {
  std::vector<ArmTransition> out(transitions.begin(), transitions.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const ArmTransition& a, const ArmTransition& b) { return a.transition.day < b.transition.day; });
  return out;
}

}  // namespace ert
