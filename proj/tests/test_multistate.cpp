#include <cmath>
#include <random>

#include "doctest.h"
#include "ert/multistate.hpp"
#include "oracles.hpp"

using namespace ert;

TEST_CASE("state names") {
  CHECK(parse_state("ICU") == State::ICU);
  CHECK(parse_state("ward") == State::Ward);
  CHECK(parse_state("3") == State::Home);
  CHECK(state_name(State::Dead) == "dead");
  CHECK_THROWS_AS(parse_state("hospice"), DataError);
  CHECK_THROWS_AS(state_from_index(4), DataError);
}

TEST_CASE("transition classes") {
  CHECK(classify(State::ICU, State::Ward) == TransitionClass::Good);
  CHECK(classify(State::Ward, State::Home) == TransitionClass::Good);
  CHECK(classify(State::Ward, State::ICU) == TransitionClass::Bad);
  CHECK(classify(State::ICU, State::Dead) == TransitionClass::Bad);
  CHECK(classify(State::Ward, State::Dead) == TransitionClass::Bad);
  CHECK_THROWS_AS(classify(State::Ward, State::Ward), DataError);
}

TEST_CASE("transition matrix validation") {
  using Rows = std::array<TransitionMatrix::Row, kStateCount>;
  Rows bad_sum{{{0.5, 0.4, 0.0, 0.0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  CHECK_THROWS_AS(TransitionMatrix{bad_sum}, ConfigError);
  Rows leaky{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0.1, 0, 0.9, 0}, {0, 0, 0, 1}}};
  CHECK_THROWS_AS(TransitionMatrix{leaky}, ConfigError);
  Rows negative{{{1.1, -0.1, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
  CHECK_THROWS_AS(TransitionMatrix{negative}, ConfigError);
  CHECK_NOTHROW(TransitionMatrix::reference_control());
}

TEST_CASE("exact day-28 distribution from the reference matrices") {
  // numpy matrix_power of the same matrices
  const auto c = TransitionMatrix::reference_control().distribution_after(State::ICU, 28);
  const auto t = TransitionMatrix::reference_treatment().distribution_after(State::ICU, 28);
  double sum = 0;
  for (double v : c) sum += v;
  CHECK(sum == doctest::Approx(1.0));
  CHECK(c[state_index(State::Ward)] == doctest::Approx(0.20243518).epsilon(1e-7));
  CHECK(c[state_index(State::ICU)] == doctest::Approx(0.26390659).epsilon(1e-7));
  CHECK(c[state_index(State::Home)] == doctest::Approx(0.19426159).epsilon(1e-7));
  CHECK(c[state_index(State::Dead)] == doctest::Approx(0.33939663).epsilon(1e-7));
  CHECK(t[state_index(State::Ward)] == doctest::Approx(0.17156925).epsilon(1e-7));
  CHECK(t[state_index(State::ICU)] == doctest::Approx(0.16303102).epsilon(1e-7));
  CHECK(t[state_index(State::Home)] == doctest::Approx(0.34217813).epsilon(1e-7));
  CHECK(t[state_index(State::Dead)] == doctest::Approx(0.32322159).epsilon(1e-7));
}

TEST_CASE("patient paths record only real moves and stop when absorbed") {
  std::mt19937_64 rng(12);
  const auto m = TransitionMatrix::reference_treatment();
  for (int k = 0; k < 500; ++k) {
    const auto path = simulate_patient_path(m, State::ICU, 28, rng);
    State cur = State::ICU;
    int last_day = 0;
    for (const auto& tr : path.transitions) {
      CHECK(tr.from == cur);
      CHECK(tr.from != tr.to);
      CHECK(tr.day > last_day);
      CHECK(tr.day <= 28);
      cur = tr.to;
      last_day = tr.day;
    }
    CHECK(path.final_state == cur);
  }
  const auto still = simulate_patient_path(TransitionMatrix::identity(), State::Ward, 28, rng);
  CHECK(still.transitions.empty());
  CHECK(still.final_state == State::Ward);
}

TEST_CASE("multistate wager") {
  MultistateConfig cfg;
  TransitionCounts c{6, 10, 2, 10};  // good rates 0.6 vs 0.2
  CHECK(multistate_wager(c, TransitionClass::Good, 30, cfg) == 0.5);
  CHECK(multistate_wager(c, TransitionClass::Good, 80, cfg) == doctest::Approx(0.7));
  CHECK(multistate_wager(c, TransitionClass::Bad, 80, cfg) == doctest::Approx(0.3));
  CHECK(multistate_wager(TransitionCounts{3, 3, 0, 0}, TransitionClass::Good, 80, cfg) == 0.5);
  cfg.strategy = BettingStrategy::full_kelly();
  TransitionCounts extreme{10, 10, 0, 10};
  CHECK(multistate_wager(extreme, TransitionClass::Good, 80, cfg) == kMultistateWagerCeiling);
  CHECK(multistate_wager(extreme, TransitionClass::Bad, 80, cfg) == kMultistateWagerFloor);
}

TEST_CASE("multistate monitor matches the naive oracle") {
  std::mt19937_64 rng(64);
  const auto ctrl = TransitionMatrix::reference_control();
  const auto trt = TransitionMatrix::reference_treatment();
  std::bernoulli_distribution coin(0.5);
  std::vector<int> arm, good;
  MultistateMonitor mon;
  std::vector<double> got;
  for (int p = 0; p < 120; ++p) {
    const bool t = coin(rng);
    for (const auto& tr : simulate_patient_path(t ? trt : ctrl, State::ICU, 28, rng).transitions) {
      arm.push_back(t);
      good.push_back(classify(tr.from, tr.to) == TransitionClass::Good);
      got.push_back(mon.step(tr.from, tr.to, t ? Arm::Treatment : Arm::Control).log_wealth);
    }
  }
  const auto want = oracle::multistate_path(arm, good, 30, 50);
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("multistate rejects moves out of absorbing states") {
  MultistateMonitor mon;
  CHECK_THROWS_AS(mon.step(State::Home, State::Ward, Arm::Control), DataError);
  CHECK_THROWS_AS(mon.step(State::ICU, State::ICU, Arm::Control), DataError);
  CHECK(mon.ledger().size() == 0);
}

TEST_CASE("transitions ordered by day keep arrival order on ties") {
  std::vector<ArmTransition> v{{{State::ICU, State::Ward, 3}, Arm::Control},
                               {{State::ICU, State::Dead, 1}, Arm::Treatment},
                               {{State::Ward, State::Home, 3}, Arm::Treatment}};
  const auto o = order_transitions(v);
  CHECK(o[0].transition.day == 1);
  CHECK(o[1].arm == Arm::Control);
  CHECK(o[2].arm == Arm::Treatment);
}
