#include <cmath>

#include "doctest.h"
#include "ert/core.hpp"
#include "ert/strategy.hpp"

using namespace ert;

TEST_CASE("ramp coefficient") {
  const RampSchedule s{50, 100};
  CHECK(ramp_coefficient(1, s) == 0.0);
  CHECK(ramp_coefficient(50, s) == 0.0);
  CHECK(ramp_coefficient(51, s) == doctest::Approx(0.01));
  CHECK(ramp_coefficient(100, s) == doctest::Approx(0.5));
  CHECK(ramp_coefficient(150, s) == 1.0);
  CHECK(ramp_coefficient(10'000, s) == 1.0);
  double prev = 0.0;
  for (std::int64_t i = 1; i < 300; ++i) {
    const double c = ramp_coefficient(i, s);
    CHECK(c >= prev);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    prev = c;
  }
  CHECK_THROWS_AS(RampSchedule(-1, 10), ConfigError);
  CHECK_THROWS_AS(RampSchedule(0, 0), ConfigError);
}

TEST_CASE("wager clamp") {
  CHECK(clamp_lambda(1.7) == 0.999);
  CHECK(clamp_lambda(-0.3) == 0.001);
  CHECK(clamp_lambda(0.42) == 0.42);
  CHECK(clamp_lambda(0.995, 0.01, 0.99) == 0.99);
  CHECK_THROWS_AS(clamp_lambda(std::nan("")), ConfigError);
  CHECK_THROWS_AS(clamp_lambda(INFINITY), ConfigError);
}

TEST_CASE("martingale identity over a grid") {
  for (int li = 1; li <= 999; ++li) {
    for (int pi = 1; pi <= 9; ++pi) {
      const double lambda = li / 1000.0;
      const double p = pi / 10.0;
      CHECK(std::abs(martingale_audit(lambda, p) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("two-sided multiplier") {
  CHECK(two_sided_multiplier(0.527, Arm::Treatment, 0.5) == doctest::Approx(1.054));
  CHECK(two_sided_multiplier(0.473, Arm::Control, 0.5) == doctest::Approx(1.054));
  CHECK(two_sided_multiplier(0.6, Arm::Treatment, 2.0 / 3.0) == doctest::Approx(0.9));
  CHECK(two_sided_multiplier(0.6, Arm::Control, 2.0 / 3.0) == doctest::Approx(1.2));
  CHECK_THROWS_AS(two_sided_multiplier(0.5, Arm::Control, 0.0), ConfigError);
  CHECK_THROWS_AS(two_sided_multiplier(0.5, Arm::Control, 1.0), ConfigError);
}

TEST_CASE("arm helpers") {
  CHECK(arm_from_int(0) == Arm::Control);
  CHECK(arm_from_int(1) == Arm::Treatment);
  CHECK_THROWS_AS(arm_from_int(2), DataError);
  CHECK(flip(Arm::Control) == Arm::Treatment);
}

TEST_CASE("ledger crossing latches at the first index") {
  WealthLedger led(0.05);
  CHECK(led.wealth() == 1.0);
  CHECK_FALSE(led.crossed());
  for (int k = 0; k < 4; ++k) led.record(0.9, 2.0);  // 16
  CHECK_FALSE(led.crossed());
  led.record(0.9, 2.0);  // 32
  REQUIRE(led.crossed());
  CHECK(*led.crossed_at() == 5);
  led.record(0.1, 0.01);
  CHECK(led.wealth() < 1.0);
  CHECK(*led.crossed_at() == 5);
  CHECK(led.last()->crossed);
  CHECK(led.steps().size() == 6);
  CHECK(led.max_log_wealth() == doctest::Approx(std::log(32.0)));
}

TEST_CASE("ledger crossing at exactly the threshold") {
  WealthLedger led(0.5);
  led.record(0.5, 2.0);
  CHECK(led.crossed());
}

TEST_CASE("ledger rejects non-positive multipliers") {
  WealthLedger led;
  CHECK_THROWS_AS(led.record(0.5, 0.0), DataError);
  CHECK_THROWS_AS(led.record(0.5, -1.0), DataError);
  CHECK_THROWS_AS(led.record(0.5, INFINITY), DataError);
  CHECK(led.size() == 0);
  CHECK_THROWS_AS(WealthLedger(0.0), ConfigError);
  CHECK_THROWS_AS(WealthLedger(1.0), ConfigError);
}

TEST_CASE("ledger snapshot round trip continues bit-identically") {
  WealthLedger a(0.05, false);
  const double mults[] = {1.1, 0.93, 1.7, 0.51, 1.3333, 2.2, 0.999};
  for (int k = 0; k < 4; ++k) a.record(0.5, mults[k]);
  WealthLedger b = WealthLedger::restore(a.snapshot(), false);
  for (int k = 4; k < 7; ++k) {
    a.record(0.5, mults[k]);
    b.record(0.5, mults[k]);
  }
  CHECK(a.log_wealth() == b.log_wealth());
  CHECK(a.size() == b.size());
  CHECK(a.crossed_at() == b.crossed_at());
}

TEST_CASE("apply_bet validates the wager") {
  WealthLedger led;
  CHECK_THROWS_AS(apply_bet(led, 1.2, Arm::Control, 0.5), ConfigError);
  CHECK_THROWS_AS(apply_bet(led, std::nan(""), Arm::Control, 0.5), ConfigError);
  const auto& s = apply_bet(led, 0.8, Arm::Treatment, 0.5);
  CHECK(s.multiplier == doctest::Approx(1.6));
  CHECK(s.index == 1);
}

TEST_CASE("strategy parsing") {
  CHECK(BettingStrategy::parse("half-kelly") == BettingStrategy::half_kelly());
  CHECK(BettingStrategy::parse("full-kelly") == BettingStrategy::full_kelly());
  CHECK(BettingStrategy::parse("doubly-adaptive") == BettingStrategy::doubly_adaptive());
  CHECK(BettingStrategy::parse("fixed:0.25") == BettingStrategy::fixed(0.25));
  CHECK(BettingStrategy::parse("sign-only:0.6") == BettingStrategy::sign_only(0.6));
  CHECK(BettingStrategy::fixed(0.1).to_string() == "fixed:0.1");
  CHECK(BettingStrategy::parse(BettingStrategy::fixed(0.123456789).to_string()).param == 0.123456789);
  CHECK_THROWS_AS(BettingStrategy::parse("fixed"), ConfigError);
  CHECK_THROWS_AS(BettingStrategy::parse("fixed:1.5"), ConfigError);
  CHECK_THROWS_AS(BettingStrategy::parse("fixed:abc"), ConfigError);
  CHECK_THROWS_AS(BettingStrategy::parse("half-kelly:2"), ConfigError);
  CHECK_THROWS_AS(BettingStrategy::parse("kelly"), ConfigError);
  CHECK_THROWS_AS(BettingStrategy::fixed(0.0), ConfigError);
}
