#pragma once

// Test-only numerical oracles. They evaluate definitions directly and never
// call the closed forms they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include <Eigen/Dense>

namespace testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Fn = std::function<double(double)>;

/// argmin of a convex function on [lo, hi]; +inf values are allowed.
inline double argmin(const Fn& fn, double lo, double hi) {
  // coarse scan first so that plateaus of +inf do not mislead the bracketing
  const int N = 2001;
  double best = lo, fbest = kInf;
  for (int k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) / (N - 1);
    const double x = lo * (1.0 - t) + hi * t;
    const double fx = fn(x);
    if (fx < fbest) {
      fbest = fx;
      best = x;
    }
  }
  const double h = (hi - lo) / (N - 1);
  double a = best - h, b = best + h;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int k = 0; k < 200; ++k) {
    if (fc <= fd) {
      b = d; d = c; fd = fc; c = b - r * (b - a); fc = fn(c);
    } else {
      a = c; c = d; fc = fd; d = a + r * (b - a); fd = fn(d);
    }
  }
  const double x = fc <= fd ? c : d;
  return std::min(fc, fd) <= fbest ? x : best;
}

/// prox of gamma * fn at x, searched on [x - width, x + width].
inline double prox(const Fn& fn, double gamma, double x, double width) {
  return argmin([&](double u) { return 0.5 * (u - x) * (u - x) + gamma * fn(u); }, x - width, x + width);
}

/// sup over a uniform grid of v x - fn(x).
inline double grid_sup(const Fn& fn, double v, double lo, double hi, int N = 200001) {
  double best = -kInf;
  for (int k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) / (N - 1);
    const double x = lo * (1.0 - t) + hi * t;
    const double fx = fn(x);
    if (std::isfinite(fx)) best = std::max(best, v * x - fx);
  }
  return best;
}

inline double right_diff(const Fn& fn, double x, double h = 1e-7) { return (fn(x + h) - fn(x)) / h; }
inline double left_diff(const Fn& fn, double x, double h = 1e-7) { return (fn(x) - fn(x - h)) / h; }

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) A(i, j) = normal(rng);
  return A;
}

inline Eigen::VectorXd labels(std::mt19937_64& rng, int m) {
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) y[i] = coin(rng) ? 1.0 : -1.0;
  return y;
}

inline bool close(double a, double b, double rel, double abs = 0.0) {
  if (a == b) return true;
  return std::abs(a - b) <= abs + rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace testing
