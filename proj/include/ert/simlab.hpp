#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ert/core.hpp"
#include "ert/multistate.hpp"
#include "ert/strategy.hpp"

namespace ert {

enum class Variant { Binary, Deaths, Continuous, Survival, Multistate };

std::string_view variant_name(Variant v);
/// "binary", "deaths", "continuous", "survival", "multistate".
Variant parse_variant(std::string_view text);

struct BinaryScenario {
  double p_ctrl = 0.4;
  double p_trt = 0.4;
  std::int64_t n_patients = 0;
  double allocation = 0.5;
};

struct DeathsScenario {
  double coin = 0.5;  // P(death is from treatment)
  std::int64_t n_deaths = 0;

  /// Coin and expected death count of a 1:1 trial with the given mortality rates.
  static DeathsScenario from_rates(double p_ctrl, double p_trt, std::int64_t n_patients);
};

struct ContinuousScenario {
  double mu_ctrl = 0.0;
  double mu_trt = 0.0;
  double sd = 1.0;
  std::int64_t n_patients = 0;
  double allocation = 0.5;
  double c_max = 0.6;
};

struct SurvivalScenario {
  double hr = 1.0;
  double shape = 1.2;
  double scale = 10.0;
  double cens_prop = 0.0;
  std::int64_t n_patients = 0;
  double recruit_period = 0.0;  // > 0: uniform staggered entry over [0, recruit_period)
};

struct MultistateScenario {
  TransitionMatrix ctrl = TransitionMatrix::reference_control();
  TransitionMatrix trt = TransitionMatrix::reference_treatment();
  std::int64_t n_patients = 0;
  int horizon = 28;
  State start = State::ICU;
};

using ScenarioParams =
    std::variant<BinaryScenario, DeathsScenario, ContinuousScenario, SurvivalScenario, MultistateScenario>;

struct SimScenario {
  std::string name;
  ScenarioParams params;
  std::int64_t n_sims = 2000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  std::optional<RampSchedule> ramp;          // variant default when empty
  std::optional<BettingStrategy> strategy;   // variant default when empty
  unsigned workers = 0;                      // 0 = hardware concurrency

  Variant variant() const;
  void validate() const;
};

RampSchedule default_ramp(Variant v);
BettingStrategy default_strategy(Variant v);

struct ReplicationOutcome {
  std::optional<std::int64_t> crossed_at;
  double final_log_e = 0.0;
  std::int64_t length = 0;
};

struct OperatingCharacteristics {
  std::int64_t n_sims = 0;
  std::int64_t rejections = 0;
  double rejection_rate = 0.0;
  double standard_error = 0.0;
  std::optional<double> median_first_crossing;  // over crossing replications
  std::optional<double> crossing_fraction;      // median crossing / median stream length
  double median_stream_length = 0.0;
  // Final e-value quantiles (computed on log scale, type-7 interpolation).
  double e_q10 = 1.0;
  double e_q25 = 1.0;
  double e_median = 1.0;
  double e_q75 = 1.0;
  double e_q90 = 1.0;
};

/// Type-7 quantile of unsorted data; throws on empty input.
double quantile(std::vector<double> values, double q);

OperatingCharacteristics summarize(std::span<const ReplicationOutcome> outcomes);

/// Calls fn(i) for i in [0, n) on `workers` threads. Each index runs exactly once.
void parallel_for(std::int64_t n, unsigned workers, const std::function<void(std::int64_t)>& fn);

/// One replication of the scenario; its RNG depends only on (seed, rep).
/// With `trajectory`, the full wealth path is written there.
ReplicationOutcome run_replication(const SimScenario& scenario, std::int64_t rep,
                                   std::vector<WealthStep>* trajectory = nullptr);

std::vector<ReplicationOutcome> run_replications(const SimScenario& scenario);

OperatingCharacteristics run_operating_characteristics(const SimScenario& scenario);

/// Full wealth paths of the first n_trials replications.
std::vector<std::vector<WealthStep>> simulate_trajectories(const SimScenario& scenario, std::int64_t n_trials);

/// Empirical final-state shares of n_patients simulated paths.
std::array<double, kStateCount> simulate_final_distribution(const TransitionMatrix& matrix, std::int64_t n_patients,
                                                            State start, int horizon, std::uint64_t seed);

struct HeadToHeadRow {
  double baseline = 0.0;
  double p_trt = 0.0;
  double coin = 0.0;
  std::int64_t n_patients = 0;
  std::int64_t expected_deaths = 0;
  double binary_power = 0.0;
  double deaths_power = 0.0;
  double delta = 0.0;  // deaths - binary
  std::string winner;
};

struct HeadToHeadConfig {
  std::vector<double> baselines;
  double arr = 0.05;
  double power = 0.8;
  std::int64_t n_sims = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  unsigned workers = 0;
};

/// Each simulated trial (sized for the binary test) is analysed twice: the
/// binary monitor sees every patient, the deaths monitor only the deaths.
std::vector<HeadToHeadRow> head_to_head_deaths_vs_binary(const HeadToHeadConfig& cfg);

struct WageStudyConfig {
  Variant variant = Variant::Survival;
  std::vector<BettingStrategy> strategies;
  /// Survival: hazard ratio. Binary and deaths: absolute risk reduction from
  /// `baseline`. Continuous: standardized mean difference.
  std::vector<double> effects;
  double baseline = 0.4;
  double design_power = 0.8;
  std::optional<std::int64_t> n_override;  // else sized per effect
  std::int64_t n_sims = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  unsigned workers = 0;
};

struct WageCell {
  BettingStrategy strategy;
  double effect = 0.0;
  std::int64_t n = 0;
  OperatingCharacteristics oc;
};

/// Scenario used for one wage-study cell.
SimScenario wage_scenario(const WageStudyConfig& cfg, const BettingStrategy& strategy, double effect);

std::vector<WageCell> wage_study(const WageStudyConfig& cfg);

}  // namespace ert
