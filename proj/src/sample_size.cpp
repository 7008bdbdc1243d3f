#include "ert/sample_size.hpp"

#include <boost/math/distributions/non_central_t.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <functional>

#include "ert/core.hpp"

namespace ert {

namespace {

void check_power_alpha(double power, double alpha) {
  if (!(power > 0.0 && power < 1.0)) throw ConfigError("power must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
}

// Root of an increasing power curve in n on [lo, hi].
double solve_n(const std::function<double(double)>& excess_power, double lo) {
  double hi = std::max(2.0 * lo, 16.0);
  while (excess_power(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw ConfigError("sample size does not converge");
  }
  if (excess_power(lo) >= 0.0) return lo;
  std::uintmax_t iters = 200;
  boost::math::tools::eps_tolerance<double> tol(50);
  const auto [a, b] = boost::math::tools::toms748_solve(excess_power, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

std::int64_t twice_ceil(double n_per_arm) {
  // Shave representation noise before rounding up (e.g. 100.00000000001).
  return 2 * static_cast<std::int64_t>(std::ceil(n_per_arm - 1e-9));
}

}  // namespace

double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

double two_proportion_n_per_arm(double p1, double p2, double power, double alpha) {
  check_power_alpha(power, alpha);
  if (!(p1 > 0.0 && p1 < 1.0 && p2 > 0.0 && p2 < 1.0)) throw ConfigError("rates must lie in (0,1)");
  if (p1 == p2) throw ConfigError("degenerate rates: p1 == p2");
  const double q1 = 1.0 - p1;
  const double q2 = 1.0 - p2;
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double diff = std::abs(p1 - p2);
  const double null_sd = std::sqrt((p1 + p2) * (q1 + q2) / 2.0);
  const double alt_sd = std::sqrt(p1 * q1 + p2 * q2);
  const boost::math::normal std_normal;
  auto excess = [&](double n) { return boost::math::cdf(std_normal, (std::sqrt(n) * diff - z * null_sd) / alt_sd) - power; };
  return solve_n(excess, 2.0);
}

std::int64_t size_two_proportion(double p1, double p2, double power, double alpha) {
  return twice_ceil(two_proportion_n_per_arm(p1, p2, power, alpha));
}

double t_test_n_per_arm(double d, double power, double alpha) {
  check_power_alpha(power, alpha);
  if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("effect size d must be > 0");
  auto excess = [&](double n) {
    const double df = 2.0 * (n - 1.0);
    const double crit = boost::math::quantile(boost::math::students_t(df), 1.0 - alpha / 2.0);
    const boost::math::non_central_t nct(df, std::sqrt(n / 2.0) * d);
    return boost::math::cdf(boost::math::complement(nct, crit)) - power;
  };
  return solve_n(excess, 2.0);
}

std::int64_t size_t_test(double d, double power, double alpha) { return twice_ceil(t_test_n_per_arm(d, power, alpha)); }

std::int64_t size_logrank(double hr, double power, double alpha) {
  check_power_alpha(power, alpha);
  if (!(hr > 0.0) || !std::isfinite(hr)) throw ConfigError("hazard ratio must be > 0");
  if (hr == 1.0) throw ConfigError("hazard ratio 1 has no design size");
  const double z_alpha = normal_quantile(1.0 - alpha / 2.0);
  const double z_beta = normal_quantile(power);
  const double root = (z_alpha + z_beta) / std::log(hr);
  return static_cast<std::int64_t>(std::ceil(4.0 * root * root));
}

}  // namespace ert
