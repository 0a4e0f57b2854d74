#include "l0bb/l0term.hpp"

#include <cmath>

#include "l0bb/errors.hpp"

namespace l0bb {

L0Regularizer::L0Regularizer(double lambda, PenaltyModel penalty)
    : lambda_(lambda),
      penalty_(penalty),
      positive_(compute_params(penalty, lambda, Side::Positive)),
      negative_(compute_params(penalty, lambda, Side::Negative)) {}

double g_value(const L0Regularizer& r, double x) {
  if (x == 0.0) return 0.0;
  return r.lambda() + value(r.penalty(), x);
}

double biconj_value(const L0Regularizer& r, double x) {
  const PenaltyParams& k = r.params_at(x);
  const double a = std::abs(x);
  // the tau |x| branch is also taken at |x| == mu, where both branches agree
  if (a <= k.mu) return ext_mul(k.tau, a);
  return value(r.penalty(), x) + r.lambda();
}

Interval biconj_subdiff(const L0Regularizer& r, double x) {
  if (!std::isfinite(value(r.penalty(), x))) {
    throw DomainError("biconj_subdiff: x outside dom h");
  }
  if (x == 0.0) return {-r.params(Side::Negative).tau, r.params(Side::Positive).tau};
  const PenaltyParams& k = r.params_at(x);
  const double a = std::abs(x);
  const double s = sign(x);
  if (a < k.mu) return Interval::point(s * k.tau);
  if (a == k.mu) return Interval{k.tau, k.kappa}.signed_by(s);
  return subdiff(r.penalty(), x);
}

double biconj_prox(const L0Regularizer& r, double gamma, double x) {
  const PenaltyParams& k = r.params_at(x);
  const double a = std::abs(x);
  const double shrink = ext_mul(gamma, k.tau);
  if (a <= shrink) return 0.0;
  if (a <= shrink + k.mu) return x - sign(x) * shrink;
  return prox(r.penalty(), gamma, x);
}

double conj_value(const L0Regularizer& r, double v) {
  if (std::abs(v) <= r.params_at(v).tau) return 0.0;
  return pos_part(conjugate(r.penalty(), v) - r.lambda());
}

Interval conj_subdiff(const L0Regularizer& r, double v) {
  if (!std::isfinite(conjugate(r.penalty(), v))) {
    throw DomainError("conj_subdiff: v outside dom h*");
  }
  const PenaltyParams& k = r.params_at(v);
  const double a = std::abs(v);
  if (a < k.tau) return Interval::point(0.0);
  if (a == k.tau) return Interval{0.0, k.mu}.signed_by(sign(v));
  return conjugate_subdiff(r.penalty(), v);
}

double conj_prox(const L0Regularizer& r, double gamma, double v) {
  const PenaltyParams& k = r.params_at(v);
  const double a = std::abs(v);
  if (a <= k.tau) return v;
  if (a <= k.tau + ext_mul(gamma, k.mu)) return sign(v) * k.tau;
  return conjugate_prox(r.penalty(), gamma, v);
}

}  // namespace l0bb
