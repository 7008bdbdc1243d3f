#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ert/core.hpp"
#include "ert/multistate.hpp"
#include "ert/survival.hpp"

namespace ert {

/// Independent engine for replication `rep` of a run seeded with `seed`.
/// `stream` separates independent draws inside one replication.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t rep, std::uint64_t stream = 0);

double uniform01(std::mt19937_64& rng);
Arm draw_arm(double p_treatment, std::mt19937_64& rng);

struct BinaryTrial {
  std::vector<Arm> arms;
  std::vector<int> outcomes;
};

BinaryTrial simulate_binary_trial(std::int64_t n, double p_ctrl, double p_trt, double allocation, std::mt19937_64& rng);

/// Arm labels of `n` deaths, each from treatment with probability `coin`.
std::vector<Arm> simulate_death_arms(std::int64_t n, double coin, std::mt19937_64& rng);

struct ContinuousTrial {
  std::vector<Arm> arms;
  std::vector<double> outcomes;
};

ContinuousTrial simulate_continuous_trial(std::int64_t n, double mu_ctrl, double mu_trt, double sd, double allocation,
                                          std::mt19937_64& rng);

struct SurvivalTrial {
  std::vector<SurvivalRecord> records;  // enrollment order, time = time on study
  std::int64_t n_trt = 0;
  std::int64_t n_ctrl = 0;
};

/// Weibull(shape, scale) control times; treatment scale = scale / hr^(1/shape).
/// cens_prop > 0 enables Uniform(0, 2*scale) censoring.
SurvivalTrial simulate_survival_trial(std::int64_t n, double hr, double shape, double scale, double cens_prop,
                                      std::mt19937_64& rng);

struct MultistateTrial {
  std::vector<ArmTransition> transitions;  // patient loop order
  std::vector<Arm> patient_arms;
  std::vector<State> final_states;
};

MultistateTrial simulate_multistate_trial(std::int64_t n_patients, const TransitionMatrix& ctrl,
                                          const TransitionMatrix& trt, State start, int horizon, std::mt19937_64& rng,
                                          const StateModel& model = {});

}  // namespace ert
