#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "l0bb/extended.hpp"

namespace l0bb {

enum class PenaltyFamily {
  BigM,        // eta(|x| <= M)
  L1,          // sigma |x|
  PowerP,      // (sigma / p) |x|^p, p > 1
  L1L2,        // sigma |x| + (sigma2 / 2) x^2
  BigML1,      // sigma |x| + eta(|x| <= M)
  BigML2,      // (sigma / 2) x^2 + eta(|x| <= M)
  PositiveL1,  // sigma x + eta(x >= 0)
  PositiveL2,  // (sigma / 2) x^2 + eta(x >= 0)
};

std::string_view family_name(PenaltyFamily family);

/// Separable convex penalty h with h(x) >= h(0) = 0.
///
/// Only the parameters relevant to the family are meaningful; the factories
/// validate them and throw ConfigError on non-positive values.
struct PenaltyModel {
  PenaltyFamily family = PenaltyFamily::BigM;
  double M = 0.0;
  double sigma = 0.0;
  double sigma2 = 0.0;
  double p = 2.0;

  static PenaltyModel big_m(double M);
  static PenaltyModel l1(double sigma);
  static PenaltyModel power(double sigma, double p);
  static PenaltyModel l1_l2(double sigma, double sigma2);
  static PenaltyModel big_m_l1(double M, double sigma);
  static PenaltyModel big_m_l2(double M, double sigma);
  static PenaltyModel positive_l1(double sigma);
  static PenaltyModel positive_l2(double sigma);

  /// h(-x) == h(x).
  bool is_even() const;

  bool operator==(const PenaltyModel&) const = default;
};

/// Half-line on which the key parameters are evaluated. Even penalties use
/// the same parameters on both sides.
enum class Side { Positive, Negative };

/// Key parameters of g = lambda ||.||_0 + h on one half-line.
///
/// tau is the slope of g** near zero, mu the breakpoint where g** rejoins
/// h + lambda and kappa the right slope of g** at mu. beta is the supremum of
/// dom h* on the half-line (diagnostic only). On the negative side of a
/// one-sided family the domain collapses and every field is +inf.
struct PenaltyParams {
  double tau = 0.0;
  double mu = kInf;
  double kappa = kInf;
  double beta = kInf;
};

double value(const PenaltyModel& h, double x);
double conjugate(const PenaltyModel& h, double v);
double prox(const PenaltyModel& h, double gamma, double x);

/// Subdifferential of h. Throws DomainError if h(x) is infinite.
Interval subdiff(const PenaltyModel& h, double x);

/// Subdifferential of h*. Throws DomainError if h*(v) is infinite.
Interval conjugate_subdiff(const PenaltyModel& h, double v);

/// prox of gamma * h*. Closed forms where registered, Moreau otherwise.
double conjugate_prox(const PenaltyModel& h, double gamma, double v);

/// prox of gamma * h* through v - gamma * prox_{h/gamma}(v / gamma).
double conjugate_prox_moreau(const PenaltyModel& h, double gamma, double v);

/// Closed-form (tau, mu, kappa, beta). Requires lambda > 0.
PenaltyParams compute_params(const PenaltyModel& h, double lambda, Side side = Side::Positive);

using ScalarFunction = std::function<double(double)>;

/// Numerical (tau, mu, kappa, beta) from h and h* alone, for x >= 0.
///
/// tau: bisection of v -> h*(v) - lambda. mu and kappa: right derivatives of
/// h* at tau and h at mu by Richardson-extrapolated one-sided differences.
PenaltyParams generic_params(const ScalarFunction& h, const ScalarFunction& h_conj,
                             double lambda);

/// generic_params on the requested side of a shipped family.
PenaltyParams generic_params(const PenaltyModel& h, double lambda, Side side = Side::Positive);

}  // namespace l0bb
