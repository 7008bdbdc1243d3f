#include "ert/generators.hpp"

#include <cmath>

namespace ert {

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  // 53 random mantissa bits in [0,1).
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Arm draw_arm(double p_treatment, std::mt19937_64& rng) {
  return uniform01(rng) < p_treatment ? Arm::Treatment : Arm::Control;
}

BinaryTrial simulate_binary_trial(std::int64_t n, double p_ctrl, double p_trt, double allocation, std::mt19937_64& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  BinaryTrial t;
  t.arms.reserve(static_cast<std::size_t>(n));
  t.outcomes.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const Arm arm = draw_arm(allocation, rng);
    const double rate = arm == Arm::Treatment ? p_trt : p_ctrl;
    t.arms.push_back(arm);
    t.outcomes.push_back(uniform01(rng) < rate ? 1 : 0);
  }
  return t;
}

std::vector<Arm> simulate_death_arms(std::int64_t n, double coin, std::mt19937_64& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  std::vector<Arm> arms;
  arms.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) arms.push_back(draw_arm(coin, rng));
  return arms;
}

ContinuousTrial simulate_continuous_trial(std::int64_t n, double mu_ctrl, double mu_trt, double sd, double allocation,
                                          std::mt19937_64& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  if (!(sd > 0.0)) throw ConfigError("sd must be > 0");
  ContinuousTrial t;
  t.arms.reserve(static_cast<std::size_t>(n));
  t.outcomes.reserve(static_cast<std::size_t>(n));
  std::normal_distribution<double> noise(0.0, sd);
  for (std::int64_t i = 0; i < n; ++i) {
    const Arm arm = draw_arm(allocation, rng);
    t.arms.push_back(arm);
    t.outcomes.push_back((arm == Arm::Treatment ? mu_trt : mu_ctrl) + noise(rng));
  }
  return t;
}

SurvivalTrial simulate_survival_trial(std::int64_t n, double hr, double shape, double scale, double cens_prop,
                                      std::mt19937_64& rng) {
  if (n < 0) throw ConfigError("n must be >= 0");
  if (!(hr > 0.0) || !(shape > 0.0) || !(scale > 0.0)) throw ConfigError("invalid survival generator parameters");
  const double scale_trt = scale / std::pow(hr, 1.0 / shape);
  SurvivalTrial t;
  t.records.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const Arm arm = draw_arm(0.5, rng);
    // 1 - u keeps the log argument in (0, 1].
    const double u = 1.0 - uniform01(rng);
    const double s = arm == Arm::Treatment ? scale_trt : scale;
    const double true_time = s * std::pow(-std::log(u), 1.0 / shape);
    SurvivalRecord rec{true_time, 1, arm};
    if (cens_prop > 0.0) {
      const double c = uniform01(rng) * 2.0 * scale;
      rec.time = std::min(true_time, c);
      rec.status = true_time <= c ? 1 : 0;
    }
    (arm == Arm::Treatment ? t.n_trt : t.n_ctrl) += 1;
    t.records.push_back(rec);
  }
  return t;
}

MultistateTrial simulate_multistate_trial(std::int64_t n_patients, const TransitionMatrix& ctrl,
                                          const TransitionMatrix& trt, State start, int horizon, std::mt19937_64& rng,
                                          const StateModel& model) {
  if (n_patients < 0) throw ConfigError("n must be >= 0");
  MultistateTrial t;
  t.patient_arms.reserve(static_cast<std::size_t>(n_patients));
  t.final_states.reserve(static_cast<std::size_t>(n_patients));
  for (std::int64_t i = 0; i < n_patients; ++i) {
    const Arm arm = draw_arm(0.5, rng);
    PatientPath path = simulate_patient_path(arm == Arm::Treatment ? trt : ctrl, start, horizon, rng, model);
    for (const auto& tr : path.transitions) t.transitions.push_back({tr, arm});
    t.patient_arms.push_back(arm);
    t.final_states.push_back(path.final_state);
  }
  return t;
}

}  // namespace ert
