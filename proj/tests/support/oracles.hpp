#pragma once

// Reference computations written independently of the library code so tests
// can compare against them.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace plcsynth::oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double f = cdf(x[k]);
    d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

// Asymptotic p-value with Stephens' small-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Elementwise form of the off-diagonal block rule.
inline Eigen::MatrixXd offdiag_double_loop(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const auto n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = 0; k < n; ++k) {
      double prod = 0.0;
      for (Eigen::Index l = 0; l < n; ++l) prod += a(m, l) * b(l, k);
      out(m, k) = 0.5 * (prod / static_cast<double>(n) + a(m, k) * b(m, k));
    }
  }
  return out;
}

// Coherence bandwidth by scanning every lag and recomputing the
// autocorrelation from scratch.
inline double coherence_bw_scan(const std::vector<std::complex<double>>& h, double f_step,
                                double level) {
  const std::size_t n = h.size();
  auto corr = [&](std::size_t lag) {
    std::complex<double> s = 0.0;
    std::size_t count = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (b == a + lag) {
          s += h[a] * std::conj(h[b]);
          ++count;
        }
      }
    }
    return std::abs(s / static_cast<double>(count));
  };
  const double r0 = corr(0);
  for (std::size_t lag = 1; lag < n; ++lag) {
    if (corr(lag) < level * r0) return static_cast<double>(lag) * f_step;
  }
  return static_cast<double>(n - 1) * f_step;
}

// Best rate over allocations of `budget`: exhaustive search on a simplex grid,
// then repeated local grid searches on a shrinking box around the best point.
inline double waterfill_grid_search(const std::vector<double>& gains, double budget, int steps) {
  const std::size_t k = gains.size();
  auto rate = [&](const std::vector<double>& free) {
    double used = 0.0, r = 0.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (free[i] < 0.0) return -1.0;
      used += free[i];
      r += std::log2(1.0 + free[i] * gains[i]);
    }
    const double last = budget - used;
    if (last < 0.0) return -1.0;
    return r + std::log2(1.0 + last * gains[k - 1]);
  };
  if (k == 1) return rate({});
  std::vector<double> best_p(k - 1, 0.0);
  double best = rate(best_p);
  double cell = budget / steps;
  std::vector<double> centre = best_p;
  std::vector<int> idx(k - 1);
  // Exhaustive pass over [0, budget]^(k-1), then +-2 cell searches around the
  // best point; the cell shrinks only once the best point stops moving.
  for (int pass = 0, shrinks = 0; shrinks < 12; ++pass) {
    const int lo = pass == 0 ? 0 : -2;
    const int hi = pass == 0 ? steps : 2;
    std::function<void(std::size_t)> rec = [&](std::size_t pos) {
      if (pos == k - 1) {
        std::vector<double> p(k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) p[i] = centre[i] + idx[i] * cell;
        const double r = rate(p);
        if (r > best) {
          best = r;
          best_p = p;
        }
        return;
      }
      for (int v = lo; v <= hi; ++v) {
        idx[pos] = v;
        rec(pos + 1);
      }
    };
    rec(0);
    const bool moved = best_p != centre;
    centre = best_p;
    if (pass == 0 || !moved) {
      cell /= 4.0;
      ++shrinks;
    }
  }
  return best;
}

}  // namespace plcsynth::oracle
