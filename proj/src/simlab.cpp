#include "ert/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "ert/binary.hpp"
#include "ert/continuous.hpp"
#include "ert/deaths.hpp"
#include "ert/generators.hpp"
#include "ert/sample_size.hpp"
#include "ert/survival.hpp"

namespace ert {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_rate(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0,1]");
}

void require_n(std::int64_t n) {
  if (n < 0) throw ConfigError("sample size must be >= 0");
}

ReplicationOutcome outcome_of(const WealthLedger& ledger) {
  return {ledger.crossed_at(), ledger.log_wealth(), ledger.size()};
}

void export_steps(const WealthLedger& ledger, std::vector<WealthStep>* trajectory) {
  if (trajectory) *trajectory = ledger.steps();
}

constexpr std::uint64_t kStaggerStream = 0x5374616767ULL;

}  // namespace

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Binary: return "binary";
    case Variant::Deaths: return "deaths";
    case Variant::Continuous: return "continuous";
    case Variant::Survival: return "survival";
    case Variant::Multistate: return "multistate";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (Variant v : {Variant::Binary, Variant::Deaths, Variant::Continuous, Variant::Survival, Variant::Multistate}) {
    if (variant_name(v) == lower) return v;
  }
  throw ConfigError("unknown variant: " + std::string(text));
}

DeathsScenario DeathsScenario::from_rates(double p_ctrl, double p_trt, std::int64_t n_patients) {
  return {death_coin(p_ctrl, p_trt), expected_deaths(n_patients, p_ctrl, p_trt)};
}

Variant SimScenario::variant() const { return static_cast<Variant>(params.index()); }

RampSchedule default_ramp(Variant v) {
  switch (v) {
    case Variant::Binary:
    case Variant::Continuous: return {50, 100};
    default: return {30, 50};
  }
}

BettingStrategy default_strategy(Variant v) {
  switch (v) {
    case Variant::Binary:
    case Variant::Multistate: return BettingStrategy::half_kelly();
    case Variant::Deaths: return BettingStrategy::full_kelly();
    case Variant::Continuous: return BettingStrategy::doubly_adaptive();
    case Variant::Survival: return BettingStrategy::fixed(0.25);
  }
  return BettingStrategy::half_kelly();
}

namespace {

BinaryConfig binary_config(const SimScenario& s, const BinaryScenario& b) {
  BinaryConfig cfg;
  cfg.p = b.allocation;
  cfg.ramp = s.ramp.value_or(default_ramp(Variant::Binary));
  cfg.alpha = s.alpha;
  cfg.strategy = s.strategy.value_or(default_strategy(Variant::Binary));
  return cfg;
}

DeathsConfig deaths_config(const SimScenario& s) {
  DeathsConfig cfg;
  cfg.ramp = s.ramp.value_or(default_ramp(Variant::Deaths));
  cfg.alpha = s.alpha;
  cfg.strategy = s.strategy.value_or(default_strategy(Variant::Deaths));
  return cfg;
}

ContinuousConfig continuous_config(const SimScenario& s, const ContinuousScenario& c) {
  ContinuousConfig cfg;
  cfg.p = c.allocation;
  cfg.ramp = s.ramp.value_or(default_ramp(Variant::Continuous));
  cfg.c_max = c.c_max;
  cfg.alpha = s.alpha;
  cfg.strategy = s.strategy.value_or(default_strategy(Variant::Continuous));
  return cfg;
}

SurvivalConfig survival_config(const SimScenario& s) {
  SurvivalConfig cfg;
  cfg.ramp = s.ramp.value_or(default_ramp(Variant::Survival));
  cfg.alpha = s.alpha;
  cfg.strategy = s.strategy.value_or(default_strategy(Variant::Survival));
  return cfg;
}

MultistateConfig multistate_config(const SimScenario& s) {
  MultistateConfig cfg;
  cfg.ramp = s.ramp.value_or(default_ramp(Variant::Multistate));
  cfg.alpha = s.alpha;
  cfg.strategy = s.strategy.value_or(default_strategy(Variant::Multistate));
  return cfg;
}

}  // namespace

void SimScenario::validate() const {
  if (n_sims < 1) throw ConfigError("n_sims must be >= 1");
  validate_alpha(alpha);
  std::visit(overloaded{
                 [&](const BinaryScenario& b) {
                   require_rate(b.p_ctrl, "p_ctrl");
                   require_rate(b.p_trt, "p_trt");
                   require_n(b.n_patients);
                   binary_config(*this, b).validate();
                 },
                 [&](const DeathsScenario& d) {
                   require_rate(d.coin, "coin");
                   require_n(d.n_deaths);
                   deaths_config(*this).validate();
                 },
                 [&](const ContinuousScenario& c) {
                   if (!std::isfinite(c.mu_ctrl) || !std::isfinite(c.mu_trt)) throw ConfigError("means must be finite");
                   if (!(c.sd > 0.0) || !std::isfinite(c.sd)) throw ConfigError("sd must be > 0");
                   require_n(c.n_patients);
                   continuous_config(*this, c).validate();
                 },
                 [&](const SurvivalScenario& v) {
                   if (!(v.hr > 0.0) || !(v.shape > 0.0) || !(v.scale > 0.0)) {
                     throw ConfigError("hr, shape and scale must be > 0");
                   }
                   if (!(v.cens_prop >= 0.0 && v.cens_prop <= 1.0)) throw ConfigError("cens_prop must lie in [0,1]");
                   if (!(v.recruit_period >= 0.0)) throw ConfigError("recruit_period must be >= 0");
                   require_n(v.n_patients);
                   survival_config(*this).validate();
                 },
                 [&](const MultistateScenario& m) {
                   require_n(m.n_patients);
                   if (m.horizon < 0) throw ConfigError("horizon must be >= 0");
                   multistate_config(*this).validate();
                 },
             },
             params);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of empty data");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

OperatingCharacteristics summarize(std::span<const ReplicationOutcome> outcomes) {
  OperatingCharacteristics oc;
  oc.n_sims = static_cast<std::int64_t>(outcomes.size());
  if (outcomes.empty()) return oc;
  std::vector<double> crossings;
  std::vector<double> lengths;
  std::vector<double> log_e;
  lengths.reserve(outcomes.size());
  log_e.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    if (o.crossed_at) crossings.push_back(static_cast<double>(*o.crossed_at));
    lengths.push_back(static_cast<double>(o.length));
    log_e.push_back(o.final_log_e);
  }
  oc.rejections = static_cast<std::int64_t>(crossings.size());
  oc.rejection_rate = static_cast<double>(oc.rejections) / static_cast<double>(oc.n_sims);
  oc.standard_error = std::sqrt(oc.rejection_rate * (1.0 - oc.rejection_rate) / static_cast<double>(oc.n_sims));
  oc.median_stream_length = quantile(lengths, 0.5);
  if (!crossings.empty()) {
    oc.median_first_crossing = quantile(crossings, 0.5);
    if (oc.median_stream_length > 0.0) oc.crossing_fraction = *oc.median_first_crossing / oc.median_stream_length;
  }
  oc.e_q10 = std::exp(quantile(log_e, 0.10));
  oc.e_q25 = std::exp(quantile(log_e, 0.25));
  oc.e_median = std::exp(quantile(log_e, 0.50));
  oc.e_q75 = std::exp(quantile(log_e, 0.75));
  oc.e_q90 = std::exp(quantile(log_e, 0.90));
  return oc;
}

void parallel_for(std::int64_t n, unsigned workers, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    try {
      for (std::int64_t i = next++; i < n; i = next++) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ReplicationOutcome run_replication(const SimScenario& s, std::int64_t rep, std::vector<WealthStep>* trajectory) {
  const bool keep = trajectory != nullptr;
  auto rng = replication_rng(s.seed, static_cast<std::uint64_t>(rep));
  return std::visit(
      overloaded{
          [&](const BinaryScenario& b) {
            const auto trial = simulate_binary_trial(b.n_patients, b.p_ctrl, b.p_trt, b.allocation, rng);
            BinaryMonitor mon(binary_config(s, b), keep);
            for (std::size_t i = 0; i < trial.arms.size(); ++i) mon.step(trial.outcomes[i], trial.arms[i]);
            export_steps(mon.ledger(), trajectory);
            return outcome_of(mon.ledger());
          },
          [&](const DeathsScenario& d) {
            DeathsMonitor mon(deaths_config(s), keep);
            for (Arm a : simulate_death_arms(d.n_deaths, d.coin, rng)) mon.step(a);
            export_steps(mon.ledger(), trajectory);
            return outcome_of(mon.ledger());
          },
          [&](const ContinuousScenario& c) {
            const auto trial = simulate_continuous_trial(c.n_patients, c.mu_ctrl, c.mu_trt, c.sd, c.allocation, rng);
            ContinuousMonitor mon(continuous_config(s, c), keep);
            for (std::size_t i = 0; i < trial.arms.size(); ++i) mon.step(trial.outcomes[i], trial.arms[i]);
            export_steps(mon.ledger(), trajectory);
            return outcome_of(mon.ledger());
          },
          [&](const SurvivalScenario& v) {
            auto trial = simulate_survival_trial(v.n_patients, v.hr, v.shape, v.scale, v.cens_prop, rng);
            std::vector<SurvivalRecord> ordered;
            if (v.recruit_period > 0.0) {
              auto entry_rng = replication_rng(s.seed, static_cast<std::uint64_t>(rep), kStaggerStream);
              std::vector<double> entry(trial.records.size());
              for (std::size_t k = 0; k < entry.size(); ++k) {
                entry[k] = uniform01(entry_rng) * v.recruit_period;
                trial.records[k].time += entry[k];
              }
              ordered = order_records(trial.records, std::span<const double>(entry));
            } else {
              ordered = order_records(trial.records);
            }
            SurvivalMonitor mon(survival_config(s), trial.n_trt, trial.n_ctrl, keep);
            for (const auto& r : ordered) mon.step(r);
            export_steps(mon.ledger(), trajectory);
            return outcome_of(mon.ledger());
          },
          [&](const MultistateScenario& m) {
            const auto trial = simulate_multistate_trial(m.n_patients, m.ctrl, m.trt, m.start, m.horizon, rng);
            const auto cfg = multistate_config(s);
            MultistateMonitor mon(cfg, keep);
            // Too few transitions to leave the burn-in: scored as a non-rejection.
            if (static_cast<std::int64_t>(trial.transitions.size()) < cfg.ramp.burn_in) {
              if (trajectory) trajectory->clear();
              return ReplicationOutcome{};
            }
            for (const auto& t : trial.transitions) mon.step(t.transition.from, t.transition.to, t.arm);
            export_steps(mon.ledger(), trajectory);
            return outcome_of(mon.ledger());
          },
      },
      s.params);
}

std::vector<ReplicationOutcome> run_replications(const SimScenario& scenario) {
  scenario.validate();
  std::vector<ReplicationOutcome> out(static_cast<std::size_t>(scenario.n_sims));
  parallel_for(scenario.n_sims, scenario.workers,
               [&](std::int64_t rep) { out[static_cast<std::size_t>(rep)] = run_replication(scenario, rep); });
  return out;
}

OperatingCharacteristics run_operating_characteristics(const SimScenario& scenario) {
  const auto outcomes = run_replications(scenario);
  return summarize(outcomes);
}

std::vector<std::vector<WealthStep>> simulate_trajectories(const SimScenario& scenario, std::int64_t n_trials) {
  scenario.validate();
  if (n_trials < 0) throw ConfigError("n_trials must be >= 0");
  std::vector<std::vector<WealthStep>> paths(static_cast<std::size_t>(n_trials));
  parallel_for(n_trials, scenario.workers,
               [&](std::int64_t rep) { run_replication(scenario, rep, &paths[static_cast<std::size_t>(rep)]); });
  return paths;
}

std::array<double, kStateCount> simulate_final_distribution(const TransitionMatrix& matrix, std::int64_t n_patients,
                                                            State start, int horizon, std::uint64_t seed) {
  if (n_patients < 1) throw ConfigError("n_patients must be >= 1");
  auto rng = replication_rng(seed, 0);
  std::array<double, kStateCount> share{};
  for (std::int64_t i = 0; i < n_patients; ++i) {
    share[state_index(simulate_patient_path(matrix, start, horizon, rng).final_state)] += 1.0;
  }
  for (double& v : share) v /= static_cast<double>(n_patients);
  return share;
}

std::vector<HeadToHeadRow> head_to_head_deaths_vs_binary(const HeadToHeadConfig& cfg) {
  if (cfg.n_sims < 1) throw ConfigError("n_sims must be >= 1");
  validate_alpha(cfg.alpha);
  std::vector<HeadToHeadRow> rows;
  for (std::size_t b = 0; b < cfg.baselines.size(); ++b) {
    HeadToHeadRow row;
    row.baseline = cfg.baselines[b];
    row.p_trt = row.baseline - cfg.arr;
    if (!(row.p_trt > 0.0)) throw ConfigError("baseline must exceed arr");
    row.coin = death_coin(row.baseline, row.p_trt);
    row.n_patients = size_two_proportion(row.baseline, row.p_trt, cfg.power, cfg.alpha);
    row.expected_deaths = expected_deaths(row.n_patients, row.baseline, row.p_trt);

    BinaryConfig bcfg;
    bcfg.alpha = cfg.alpha;
    DeathsConfig dcfg;
    dcfg.alpha = cfg.alpha;
    std::vector<std::uint8_t> bin_hit(static_cast<std::size_t>(cfg.n_sims));
    std::vector<std::uint8_t> death_hit(static_cast<std::size_t>(cfg.n_sims));
    parallel_for(cfg.n_sims, cfg.workers, [&](std::int64_t rep) {
      auto rng = replication_rng(cfg.seed, static_cast<std::uint64_t>(rep), b);
      const auto trial = simulate_binary_trial(row.n_patients, row.baseline, row.p_trt, 0.5, rng);
      BinaryMonitor bin(bcfg, false);
      DeathsMonitor deaths(dcfg, false);
      for (std::size_t i = 0; i < trial.arms.size(); ++i) {
        bin.step(trial.outcomes[i], trial.arms[i]);
        if (trial.outcomes[i] == 1) deaths.step(trial.arms[i]);
      }
      bin_hit[static_cast<std::size_t>(rep)] = bin.ledger().crossed();
      death_hit[static_cast<std::size_t>(rep)] = deaths.ledger().crossed();
    });
    const auto n = static_cast<double>(cfg.n_sims);
    row.binary_power = static_cast<double>(std::count(bin_hit.begin(), bin_hit.end(), 1)) / n;
    row.deaths_power = static_cast<double>(std::count(death_hit.begin(), death_hit.end(), 1)) / n;
    row.delta = row.deaths_power - row.binary_power;
    row.winner = row.delta > 0.0 ? "deaths" : (row.delta < 0.0 ? "binary" : "tie");
    rows.push_back(row);
  }
  return rows;
}

SimScenario wage_scenario(const WageStudyConfig& cfg, const BettingStrategy& strategy, double effect) {
  SimScenario s;
  s.n_sims = cfg.n_sims;
  s.seed = cfg.seed;
  s.alpha = cfg.alpha;
  s.workers = cfg.workers;
  s.strategy = strategy;
  switch (cfg.variant) {
    case Variant::Binary: {
      const double p_trt = cfg.baseline - effect;
      const auto n = cfg.n_override.value_or(size_two_proportion(cfg.baseline, p_trt, cfg.design_power, cfg.alpha));
      s.params = BinaryScenario{cfg.baseline, p_trt, n, 0.5};
      break;
    }
    case Variant::Deaths: {
      const double p_trt = cfg.baseline - effect;
      const auto n = cfg.n_override.value_or(size_two_proportion(cfg.baseline, p_trt, cfg.design_power, cfg.alpha));
      s.params = DeathsScenario::from_rates(cfg.baseline, p_trt, n);
      break;
    }
    case Variant::Continuous: {
      ContinuousScenario c;
      c.mu_trt = effect;
      c.n_patients = cfg.n_override.value_or(size_t_test(effect, cfg.design_power, cfg.alpha));
      s.params = c;
      break;
    }
    case Variant::Survival: {
      SurvivalScenario v;
      v.hr = effect;
      v.n_patients = cfg.n_override.value_or(size_logrank(effect, cfg.design_power, cfg.alpha));
      s.params = v;
      break;
    }
    case Variant::Multistate:
      throw ConfigError("wage study is not defined for multistate");
  }
  return s;
}

std::vector<WageCell> wage_study(const WageStudyConfig& cfg) {
  std::vector<WageCell> cells;
  for (double effect : cfg.effects) {
    for (const auto& strategy : cfg.strategies) {
      const SimScenario s = wage_scenario(cfg, strategy, effect);
      std::int64_t n = 0;
      std::visit(overloaded{[&](const DeathsScenario& d) { n = d.n_deaths; },
                            [&](const auto& p) { n = p.n_patients; }},
                 s.params);
      cells.push_back({strategy, effect, n, run_operating_characteristics(s)});
    }
  }
  return cells;
}

}  // namespace ert
