#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace l0bb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Product on the extended reals with the convention 0 * inf = inf * 0 = 0.
inline double ext_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

inline double sign(double x) { return static_cast<double>((x > 0.0) - (x < 0.0)); }

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

inline double soft_threshold(double x, double t) {
  return sign(x) * pos_part(std::abs(x) - t);
}

/// Closed interval [lo, hi] with extended-real endpoints. lo > hi is the empty set.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }
  static Interval empty() { return {kInf, -kInf}; }
  static Interval whole() { return {-kInf, kInf}; }

  bool is_empty() const { return lo > hi; }

  bool contains(double v, double slack = 0.0) const {
    return !is_empty() && v >= lo - slack && v <= hi + slack;
  }

  /// s * [lo, hi] for s in {-1, +1}.
  Interval signed_by(double s) const {
    if (s < 0.0) return {-hi, -lo};
    return *this;
  }

  bool operator==(const Interval&) const = default;
};

}  // namespace l0bb
