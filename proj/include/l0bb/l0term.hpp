#pragma once

#include "l0bb/extended.hpp"
#include "l0bb/penalty.hpp"

namespace l0bb {

/// g(x) = lambda ||x||_0 + h(x) with its key parameters cached per half-line.
class L0Regularizer {
 public:
  L0Regularizer(double lambda, PenaltyModel penalty);

  double lambda() const { return lambda_; }
  const PenaltyModel& penalty() const { return penalty_; }

  /// Parameters of the positive half-line (the only ones for even penalties).
  const PenaltyParams& params() const { return positive_; }
  const PenaltyParams& params(Side side) const {
    return side == Side::Positive ? positive_ : negative_;
  }
  /// Parameters governing the half-line that contains x.
  const PenaltyParams& params_at(double x) const { return x < 0.0 ? negative_ : positive_; }

 private:
  double lambda_;
  PenaltyModel penalty_;
  PenaltyParams positive_;
  PenaltyParams negative_;
};

double g_value(const L0Regularizer& r, double x);

/// Convex envelope g**: tau |x| below mu, h(x) + lambda beyond.
double biconj_value(const L0Regularizer& r, double x);
Interval biconj_subdiff(const L0Regularizer& r, double x);
double biconj_prox(const L0Regularizer& r, double gamma, double x);

/// g*(v) = [h*(v) - lambda]_+.
double conj_value(const L0Regularizer& r, double v);
Interval conj_subdiff(const L0Regularizer& r, double v);
double conj_prox(const L0Regularizer& r, double gamma, double v);

}  // namespace l0bb
