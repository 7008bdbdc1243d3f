#include "doctest.h"
#include "ert/core.hpp"
#include "ert/sample_size.hpp"

using namespace ert;

TEST_CASE("two-proportion sizes") {
  CHECK(size_two_proportion(0.40, 0.35, 0.80) == 2942);
  CHECK(size_two_proportion(0.40, 0.30, 0.80) == 712);
  CHECK(size_two_proportion(0.40, 0.35, 0.90) == 3938);
  CHECK(size_two_proportion(0.40, 0.30, 0.90) == 954);
  CHECK(size_two_proportion(0.10, 0.05, 0.80) == 870);
  CHECK(size_two_proportion(0.15, 0.10, 0.80) == 1372);
  CHECK(size_two_proportion(0.20, 0.15, 0.80) == 1812);
  CHECK(size_two_proportion(0.25, 0.20, 0.80) == 2188);
  CHECK(size_two_proportion(0.30, 0.25, 0.80) == 2502);
  CHECK(size_two_proportion(0.35, 0.30, 0.80) == 2754);
  CHECK(size_two_proportion(0.25, 0.15, 0.80) == 500);
  CHECK(size_two_proportion(0.35, 0.40, 0.80) == 2942);
  CHECK_THROWS_AS(size_two_proportion(0.3, 0.3, 0.8), ConfigError);
  CHECK_THROWS_AS(size_two_proportion(0.0, 0.3, 0.8), ConfigError);
  CHECK_THROWS_AS(size_two_proportion(0.4, 0.3, 1.0), ConfigError);
}

TEST_CASE("t-test sizes") {
  CHECK(size_t_test(0.20, 0.80) == 788);
  CHECK(size_t_test(0.40, 0.80) == 200);
  CHECK(size_t_test(0.60, 0.80) == 90);
  CHECK(size_t_test(0.20, 0.90) == 1054);
  CHECK(size_t_test(0.40, 0.90) == 266);
  CHECK(size_t_test(0.60, 0.90) == 120);
  CHECK(size_t_test(0.50, 0.80) == 128);
  CHECK(size_t_test(0.30, 0.80) == 352);
  // Per-arm root against an independent scipy solve of the same noncentral-t equation.
  CHECK(t_test_n_per_arm(0.4, 0.8) == doctest::Approx(99.0803).epsilon(1e-5));
  CHECK_THROWS_AS(size_t_test(0.0, 0.8), ConfigError);
  CHECK_THROWS_AS(size_t_test(-0.2, 0.8), ConfigError);
}

TEST_CASE("log-rank events") {
  CHECK(size_logrank(0.80, 0.80) == 631);
  CHECK(size_logrank(1.25, 0.80) == 631);
  CHECK(size_logrank(0.70, 0.80) == 247);
  CHECK_THROWS_AS(size_logrank(1.0, 0.8), ConfigError);
  CHECK_THROWS_AS(size_logrank(0.0, 0.8), ConfigError);
}
