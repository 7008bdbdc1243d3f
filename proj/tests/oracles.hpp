#pragma once

// Deliberately naive reference implementations. Every statistic is
// recomputed from the raw prefix at each step, so they share no state or
// code with the streaming monitors under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracle {

inline double ramp(std::int64_t i, std::int64_t burn, std::int64_t len) {
  return std::min(1.0, std::max(0.0, static_cast<double>(i - burn) / static_cast<double>(len)));
}

inline double clamp(double x, double lo, double hi) { return std::max(lo, std::min(hi, x)); }

inline double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

/// Cumulative log-wealth after each binary observation. kind: 0 half, 1 full, 2 fixed(lam).
inline std::vector<double> binary_path(const std::vector<int>& arm, const std::vector<int>& y, double p,
                                       std::int64_t burn, std::int64_t len, int kind = 0, double fixed = 0.0) {
  std::vector<double> out;
  double lw = 0.0;
  for (std::size_t i = 1; i <= arm.size(); ++i) {
    double mult = 1.0;
    if (i > 1) {
      double nt = 0, nc = 0, et = 0, ec = 0;
      for (std::size_t j = 0; j + 1 < i; ++j) {
        if (arm[j] == 1) {
          nt += 1;
          et += y[j];
        } else {
          nc += 1;
          ec += y[j];
        }
      }
      const double rt = nt > 0 ? et / nt : 0.5;
      const double rc = nc > 0 ? ec / nc : 0.5;
      const double delta = rt - rc;
      const double c = ramp(static_cast<std::int64_t>(i), burn, len);
      const double dev = kind == 0 ? 0.5 * c * delta : (kind == 1 ? c * delta : c * fixed * sgn(delta));
      const double lam = clamp(y[i - 1] == 1 ? 0.5 + dev : 0.5 - dev, 0.001, 0.999);
      mult = arm[i - 1] == 1 ? lam / p : (1 - lam) / (1 - p);
    }
    lw += std::log(mult);
    out.push_back(lw);
  }
  return out;
}

inline std::vector<double> deaths_path(const std::vector<int>& arm, std::int64_t burn, std::int64_t len) {
  std::vector<double> out;
  double lw = 0.0;
  for (std::size_t i = 1; i <= arm.size(); ++i) {
    double dt = 0, total = 0;
    for (std::size_t j = 0; j + 1 < i; ++j) {
      dt += arm[j];
      total += 1;
    }
    double lam = 0.5;
    if (static_cast<std::int64_t>(i) > burn && total > 0) {
      lam = clamp(0.5 + ramp(static_cast<std::int64_t>(i), burn, len) * (dt / total - 0.5), 0.001, 0.999);
    }
    lw += std::log(arm[i - 1] == 1 ? lam / 0.5 : (1 - lam) / 0.5);
    out.push_back(lw);
  }
  return out;
}

inline double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<long>(n / 2), v.end());
  const double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(n / 2));
  return 0.5 * (lo + hi);
}

inline double mad_of(const std::vector<double>& v, double center) {
  std::vector<double> dev;
  for (double x : v) dev.push_back(std::abs(x - center));
  return median_of(dev);
}

inline double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return std::nan("");
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// kind 0: doubly adaptive (c_max·g·d); kind 1: sign-only(c) (c·g·sign(d)).
inline std::vector<double> continuous_path(const std::vector<int>& arm, const std::vector<double>& y, double p,
                                           std::int64_t burn, std::int64_t len, double c_max, int kind = 0) {
  std::vector<double> out;
  double lw = 0.0;
  for (std::size_t i = 1; i <= arm.size(); ++i) {
    const std::size_t past = i - 1;
    if (past == 0 || static_cast<std::int64_t>(past) < burn) {
      out.push_back(lw);
      continue;
    }
    std::vector<double> prev(y.begin(), y.begin() + static_cast<long>(past));
    const double med = median_of(prev);
    double mad = mad_of(prev, med);
    if (!std::isfinite(mad) || mad <= 0) mad = 1.0;
    const double s = (y[i - 1] - med) / mad;
    const double g = s / (1 + std::abs(s));
    std::vector<double> yt, yc;
    for (std::size_t j = 0; j < past; ++j) (arm[j] == 1 ? yt : yc).push_back(y[j]);
    double d = 0.0;
    if (!yt.empty() && !yc.empty()) {
      const double mt = std::accumulate(yt.begin(), yt.end(), 0.0) / static_cast<double>(yt.size());
      const double mc = std::accumulate(yc.begin(), yc.end(), 0.0) / static_cast<double>(yc.size());
      double st = sample_sd(yt), sc = sample_sd(yc);
      if (!std::isfinite(st) || st == 0) st = 1;
      if (!std::isfinite(sc) || sc == 0) sc = 1;
      d = clamp((mt - mc) / std::sqrt((st * st + sc * sc) / 2), -1.0, 1.0);
    }
    const double r = ramp(static_cast<std::int64_t>(i), burn, len);
    const double lam = clamp(kind == 0 ? 0.5 + r * c_max * g * d : 0.5 + r * c_max * g * sgn(d), 0.001, 0.999);
    lw += std::log(arm[i - 1] == 1 ? lam / p : (1 - lam) / (1 - p));
    out.push_back(lw);
  }
  return out;
}

struct SurvRec {
  double time;
  int status;
  int arm;
};

/// Records already in processing order. Risk sets are recounted from the
/// initial randomization minus everything seen so far. kind 0 fixed(lmax), 1 half, 2 full.
inline std::vector<double> survival_path(const std::vector<SurvRec>& recs, std::int64_t n_trt, std::int64_t n_ctrl,
                                         std::int64_t burn, std::int64_t len, int kind = 0, double lmax = 0.25) {
  std::vector<double> out;
  double lw = 0.0;
  for (std::size_t i = 1; i <= recs.size(); ++i) {
    std::int64_t rt = n_trt, rc = n_ctrl;
    double z = 0, v = 0;
    for (std::size_t j = 0; j + 1 < i; ++j) {
      const double pj = (rt + rc) > 0 ? static_cast<double>(rt) / static_cast<double>(rt + rc) : 0.5;
      if (recs[j].status == 1) {
        z += recs[j].arm - pj;
        v += pj * (1 - pj);
      }
      (recs[j].arm == 1 ? rt : rc) -= 1;
    }
    double b = 0.0;
    if (static_cast<std::int64_t>(i) > burn) {
      const double c = ramp(static_cast<std::int64_t>(i), burn, len);
      if (kind == 0) {
        b = c * lmax * sgn(z);
      } else if (v > 0) {
        b = c * clamp((kind == 1 ? 0.5 : 1.0) * z / v, -0.5, 0.5);
      }
    }
    if (recs[i - 1].status == 1) {
      const double p = (rt + rc) > 0 ? static_cast<double>(rt) / static_cast<double>(rt + rc) : 0.5;
      lw += std::log(1 + b * (recs[i - 1].arm - p));
    }
    out.push_back(lw);
  }
  return out;
}

/// good[i]: transition i is a good one.
inline std::vector<double> multistate_path(const std::vector<int>& arm, const std::vector<int>& good, std::int64_t burn,
                                           std::int64_t len, int kind = 0) {
  std::vector<double> out;
  double lw = 0.0;
  for (std::size_t i = 1; i <= arm.size(); ++i) {
    double gt = 0, tt = 0, gc = 0, tc = 0;
    for (std::size_t j = 0; j + 1 < i; ++j) {
      if (arm[j] == 1) {
        tt += 1;
        gt += good[j];
      } else {
        tc += 1;
        gc += good[j];
      }
    }
    double lam = 0.5;
    if (static_cast<std::int64_t>(i) > burn && tt > 0 && tc > 0) {
      const double c = ramp(static_cast<std::int64_t>(i), burn, len);
      const double delta = gt / tt - gc / tc;
      const double dev = kind == 0 ? 0.5 * c * delta : c * delta;
      lam = good[i - 1] ? 0.5 + dev : 0.5 - dev;
    }
    lam = clamp(lam, 0.01, 0.99);
    lw += std::log(arm[i - 1] == 1 ? lam / 0.5 : (1 - lam) / 0.5);
    out.push_back(lw);
  }
  return out;
}

/// Type-7 quantile by direct sort.
inline double quantile7(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace oracle
