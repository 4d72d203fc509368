#pragma once

// Small independent reference implementations used as test oracles.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

/// Integral over [a, inf) via r = a + e^y - 1, truncated at r = a + 1e20.
/// Adequate for tails decaying at least like r^-1.5.
inline double simpson_to_infinity(const std::function<double(double)>& f, double a, int n = 400000) {
  auto g = [&](double y) { return f(a + std::expm1(y)) * std::exp(y); };
  return simpson(g, 0.0, std::log(1e20), n);
}

/// (1/2N^2) sum_{i,j} (v_i - v_j).(w_i - w_j), literally.
inline double pairwise_b(const std::vector<double>& v, const std::vector<double>& w, int n, int d) {
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < d; ++k) s += (v[i * d + k] - v[j * d + k]) * (w[i * d + k] - w[j * d + k]);
  return s / (2.0 * n * n);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t size, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(size);
  for (auto& x : out) x = u(rng);
  return out;
}

}  // namespace oracle
