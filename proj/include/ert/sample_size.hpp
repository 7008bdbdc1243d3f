#pragma once

#include <cstdint>

namespace ert {

/// Per-arm n (continuous, before rounding) for a two-sided two-proportion
/// normal-approximation test; same root as R's power.prop.test.
double two_proportion_n_per_arm(double p1, double p2, double power, double alpha = 0.05);

/// Total n (both arms) = 2 * ceil(per-arm n).
std::int64_t size_two_proportion(double p1, double p2, double power, double alpha = 0.05);

/// Per-arm n for a two-sided two-sample t-test with unit SD and effect d,
/// solved exactly on the noncentral t; same root as R's power.t.test.
double t_test_n_per_arm(double d, double power, double alpha = 0.05);

std::int64_t size_t_test(double d, double power, double alpha = 0.05);

/// ceil(4 * ((z_{1-alpha/2} + z_{power}) / log(hr))^2) events.
std::int64_t size_logrank(double hr, double power, double alpha = 0.05);

double normal_quantile(double p);

}  // namespace ert
