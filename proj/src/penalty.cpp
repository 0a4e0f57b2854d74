#include "l0bb/penalty.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "l0bb/errors.hpp"

namespace l0bb {

namespace {

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(field, "must be a positive finite number");
  }
}

double power_conjugate_exponent(double p) { return p / (p - 1.0); }

// Solves u + c * u^(p-1) = a for u in [0, a], a >= 0.
double power_prox_magnitude(double a, double c, double p) {
  if (a == 0.0) return 0.0;
  if (p == 2.0) return a / (1.0 + c);
  double lo = 0.0;
  double hi = a;
  double u = a / (1.0 + c * std::pow(a, p - 2.0));
  if (!(u > lo && u < hi)) u = 0.5 * a;
  for (int it = 0; it < 200; ++it) {
    const double r = u + c * std::pow(u, p - 1.0) - a;
    if (r > 0.0) {
      hi = u;
    } else if (r < 0.0) {
      lo = u;
    } else {
      return u;
    }
    const double d = 1.0 + c * (p - 1.0) * std::pow(u, p - 2.0);
    double next = u - r / d;
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (std::abs(next - u) <= 4.0 * std::numeric_limits<double>::epsilon() * a) return next;
    u = next;
  }
  return u;
}

// Largest point of [lo, hi) on which pred holds, assuming pred(lo) and !pred(hi)
// and pred monotone (true then false).
template <typename Pred>
double bisect_last_true(Pred pred, double lo, double hi) {
  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) return lo;
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

// Right derivative of a convex function at x0 from one-sided difference
// quotients with steps 1e-4 * scale * 2^-k, Richardson-extrapolated twice.
// Returns the extrapolant that is most stable between consecutive steps.
// Steps stop at about 2e-8 * scale, below which rounding dominates. A domain
// boundary within the first step is reported as an infinite slope.
double right_derivative(const ScalarFunction& f, double x0) {
  const double f0 = f(x0);
  if (!std::isfinite(f0)) return kInf;
  const double base = 1e-4 * std::max(1.0, std::abs(x0));
  std::vector<double> q;
  std::vector<double> r1;
  std::vector<double> r2;
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_change = kInf;
  for (int k = 0; k < 13; ++k) {
    const double step = (x0 + std::ldexp(base, -k)) - x0;
    const double fd = f(x0 + step);
    if (!std::isfinite(fd)) return kInf;
    q.push_back((fd - f0) / step);
    if (q.size() >= 2) r1.push_back(2.0 * q.back() - q[q.size() - 2]);
    if (r1.size() >= 2) r2.push_back((4.0 * r1.back() - r1[r1.size() - 2]) / 3.0);
    if (r2.size() >= 2) {
      const double change = std::abs(r2.back() - r2[r2.size() - 2]);
      if (change < best_change) {
        best_change = change;
        best = r2.back();
      }
    }
  }
  return best;
}

PenaltyParams power_params(double sigma, double p, double lambda) {
  const double c = p * lambda / ((p - 1.0) * sigma);
  const double tau = sigma * std::pow(c, (p - 1.0) / p);
  return {tau, std::pow(c, 1.0 / p), tau, kInf};
}

}  // namespace

std::string_view family_name(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::BigM: return "BigM";
    case PenaltyFamily::L1: return "L1";
    case PenaltyFamily::PowerP: return "PowerP";
    case PenaltyFamily::L1L2: return "L1L2";
    case PenaltyFamily::BigML1: return "BigML1";
    case PenaltyFamily::BigML2: return "BigML2";
    case PenaltyFamily::PositiveL1: return "PositiveL1";
    case PenaltyFamily::PositiveL2: return "PositiveL2";
  }
  return "unknown";
}

PenaltyModel PenaltyModel::big_m(double M) {
  require_positive(M, "M");
  return {PenaltyFamily::BigM, M, 0.0, 0.0, 2.0};
}

PenaltyModel PenaltyModel::l1(double sigma) {
  require_positive(sigma, "sigma");
  return {PenaltyFamily::L1, 0.0, sigma, 0.0, 2.0};
}

PenaltyModel PenaltyModel::power(double sigma, double p) {
  require_positive(sigma, "sigma");
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p", "must be a finite number > 1");
  return {PenaltyFamily::PowerP, 0.0, sigma, 0.0, p};
}

PenaltyModel PenaltyModel::l1_l2(double sigma, double sigma2) {
  require_positive(sigma, "sigma");
  require_positive(sigma2, "sigma2");
  return {PenaltyFamily::L1L2, 0.0, sigma, sigma2, 2.0};
}

PenaltyModel PenaltyModel::big_m_l1(double M, double sigma) {
  require_positive(M, "M");
  require_positive(sigma, "sigma");
  return {PenaltyFamily::BigML1, M, sigma, 0.0, 2.0};
}

PenaltyModel PenaltyModel::big_m_l2(double M, double sigma) {
  require_positive(M, "M");
  require_positive(sigma, "sigma");
  return {PenaltyFamily::BigML2, M, sigma, 0.0, 2.0};
}

PenaltyModel PenaltyModel::positive_l1(double sigma) {
  require_positive(sigma, "sigma");
  return {PenaltyFamily::PositiveL1, 0.0, sigma, 0.0, 2.0};
}

PenaltyModel PenaltyModel::positive_l2(double sigma) {
  require_positive(sigma, "sigma");
  return {PenaltyFamily::PositiveL2, 0.0, sigma, 0.0, 2.0};
}

bool PenaltyModel::is_even() const {
  return family != PenaltyFamily::PositiveL1 && family != PenaltyFamily::PositiveL2;
}

double value(const PenaltyModel& h, double x) {
  const double a = std::abs(x);
  switch (h.family) {
    case PenaltyFamily::BigM: return a <= h.M ? 0.0 : kInf;
    case PenaltyFamily::L1: return h.sigma * a;
    case PenaltyFamily::PowerP:
      if (h.p == 2.0) return 0.5 * h.sigma * x * x;
      return h.sigma / h.p * std::pow(a, h.p);
    case PenaltyFamily::L1L2: return h.sigma * a + 0.5 * h.sigma2 * x * x;
    case PenaltyFamily::BigML1: return a <= h.M ? h.sigma * a : kInf;
    case PenaltyFamily::BigML2: return a <= h.M ? 0.5 * h.sigma * x * x : kInf;
    case PenaltyFamily::PositiveL1: return x >= 0.0 ? h.sigma * x : kInf;
    case PenaltyFamily::PositiveL2: return x >= 0.0 ? 0.5 * h.sigma * x * x : kInf;
  }
  return kInf;
}

double conjugate(const PenaltyModel& h, double v) {
  const double a = std::abs(v);
  switch (h.family) {
    case PenaltyFamily::BigM: return h.M * a;
    case PenaltyFamily::L1: return a <= h.sigma ? 0.0 : kInf;
    case PenaltyFamily::PowerP: {
      if (h.p == 2.0) return v * v / (2.0 * h.sigma);
      const double q = power_conjugate_exponent(h.p);
      return std::pow(a, q) * std::pow(h.sigma, 1.0 - q) / q;
    }
    case PenaltyFamily::L1L2: {
      const double t = pos_part(a - h.sigma);
      return t * t / (2.0 * h.sigma2);
    }
    case PenaltyFamily::BigML1: return h.M * pos_part(a - h.sigma);
    case PenaltyFamily::BigML2:
      if (a <= h.sigma * h.M) return v * v / (2.0 * h.sigma);
      return h.M * a - 0.5 * h.sigma * h.M * h.M;
    case PenaltyFamily::PositiveL1: return v <= h.sigma ? 0.0 : kInf;
    case PenaltyFamily::PositiveL2: {
      const double t = pos_part(v);
      return t * t / (2.0 * h.sigma);
    }
  }
  return kInf;
}

double prox(const PenaltyModel& h, double gamma, double x) {
  switch (h.family) {
    case PenaltyFamily::BigM: return std::clamp(x, -h.M, h.M);
    case PenaltyFamily::L1: return soft_threshold(x, gamma * h.sigma);
    case PenaltyFamily::PowerP:
      return sign(x) * power_prox_magnitude(std::abs(x), gamma * h.sigma, h.p);
    case PenaltyFamily::L1L2:
      return soft_threshold(x, gamma * h.sigma) / (1.0 + gamma * h.sigma2);
    case PenaltyFamily::BigML1:
      return std::clamp(soft_threshold(x, gamma * h.sigma), -h.M, h.M);
    case PenaltyFamily::BigML2: return std::clamp(x / (1.0 + gamma * h.sigma), -h.M, h.M);
    case PenaltyFamily::PositiveL1: return pos_part(x - gamma * h.sigma);
    case PenaltyFamily::PositiveL2: return pos_part(x) / (1.0 + gamma * h.sigma);
  }
  return 0.0;
}

Interval subdiff(const PenaltyModel& h, double x) {
  if (!std::isfinite(value(h, x))) throw DomainError("subdiff: x outside dom h");
  const double a = std::abs(x);
  const double s = sign(x);
  switch (h.family) {
    case PenaltyFamily::BigM:
      if (a < h.M) return Interval::point(0.0);
      return Interval{0.0, kInf}.signed_by(s);
    case PenaltyFamily::L1:
      if (x == 0.0) return {-h.sigma, h.sigma};
      return Interval::point(s * h.sigma);
    case PenaltyFamily::PowerP:
      return Interval::point(s * h.sigma * std::pow(a, h.p - 1.0));
    case PenaltyFamily::L1L2:
      if (x == 0.0) return {-h.sigma, h.sigma};
      return Interval::point(s * h.sigma + h.sigma2 * x);
    case PenaltyFamily::BigML1:
      if (x == 0.0) return {-h.sigma, h.sigma};
      if (a < h.M) return Interval::point(s * h.sigma);
      return Interval{h.sigma, kInf}.signed_by(s);
    case PenaltyFamily::BigML2:
      if (a < h.M) return Interval::point(h.sigma * x);
      return Interval{h.sigma * h.M, kInf}.signed_by(s);
    case PenaltyFamily::PositiveL1:
      if (x == 0.0) return {-kInf, h.sigma};
      return Interval::point(h.sigma);
    case PenaltyFamily::PositiveL2:
      if (x == 0.0) return {-kInf, 0.0};
      return Interval::point(h.sigma * x);
  }
  return Interval::empty();
}

Interval conjugate_subdiff(const PenaltyModel& h, double v) {
  if (!std::isfinite(conjugate(h, v))) {
    throw DomainError("conjugate_subdiff: v outside dom h*");
  }
  const double a = std::abs(v);
  const double s = sign(v);
  switch (h.family) {
    case PenaltyFamily::BigM:
      if (v == 0.0) return {-h.M, h.M};
      return Interval::point(s * h.M);
    case PenaltyFamily::L1:
      if (a < h.sigma) return Interval::point(0.0);
      return Interval{0.0, kInf}.signed_by(s);
    case PenaltyFamily::PowerP:
      return Interval::point(s * std::pow(a / h.sigma, 1.0 / (h.p - 1.0)));
    case PenaltyFamily::L1L2:
      return Interval::point(s * pos_part(a - h.sigma) / h.sigma2);
    case PenaltyFamily::BigML1:
      if (a < h.sigma) return Interval::point(0.0);
      if (a > h.sigma) return Interval::point(s * h.M);
      return Interval{0.0, h.M}.signed_by(s);
    case PenaltyFamily::BigML2:
      if (a <= h.sigma * h.M) return Interval::point(v / h.sigma);
      return Interval::point(s * h.M);
    case PenaltyFamily::PositiveL1:
      if (v < h.sigma) return Interval::point(0.0);
      return {0.0, kInf};
    case PenaltyFamily::PositiveL2: return Interval::point(pos_part(v) / h.sigma);
  }
  return Interval::empty();
}

double conjugate_prox_moreau(const PenaltyModel& h, double gamma, double v) {
  return v - gamma * prox(h, 1.0 / gamma, v / gamma);
}

double conjugate_prox(const PenaltyModel& h, double gamma, double v) {
  const double a = std::abs(v);
  const double s = sign(v);
  switch (h.family) {
    case PenaltyFamily::BigM: return soft_threshold(v, gamma * h.M);
    case PenaltyFamily::L1: return std::clamp(v, -h.sigma, h.sigma);
    case PenaltyFamily::PowerP:
      if (h.p == 2.0) return h.sigma * v / (h.sigma + gamma);
      return conjugate_prox_moreau(h, gamma, v);
    case PenaltyFamily::L1L2:
      if (a <= h.sigma) return v;
      return s * (h.sigma + (a - h.sigma) * h.sigma2 / (h.sigma2 + gamma));
    case PenaltyFamily::BigML1:
      if (a <= h.sigma) return v;
      if (a <= h.sigma + gamma * h.M) return s * h.sigma;
      return v - gamma * h.M * s;
    case PenaltyFamily::PositiveL1: return std::min(v, h.sigma);
    case PenaltyFamily::PositiveL2:
      if (v <= 0.0) return v;
      return h.sigma * v / (h.sigma + gamma);
    case PenaltyFamily::BigML2: return conjugate_prox_moreau(h, gamma, v);
  }
  return conjugate_prox_moreau(h, gamma, v);
}

PenaltyParams compute_params(const PenaltyModel& h, double lambda, Side side) {
  if (!(lambda > 0.0)) throw ConfigError("lambda", "must be positive");
  if (side == Side::Negative && !h.is_even()) return {kInf, kInf, kInf, kInf};
  switch (h.family) {
    case PenaltyFamily::BigM: return {lambda / h.M, h.M, kInf, kInf};
    case PenaltyFamily::L1:
    case PenaltyFamily::PositiveL1: return {h.sigma, kInf, kInf, h.sigma};
    case PenaltyFamily::PowerP: return power_params(h.sigma, h.p, lambda);
    case PenaltyFamily::PositiveL2: return power_params(h.sigma, 2.0, lambda);
    case PenaltyFamily::L1L2: {
      const double tau = h.sigma + std::sqrt(2.0 * lambda * h.sigma2);
      return {tau, std::sqrt(2.0 * lambda / h.sigma2), tau, kInf};
    }
    case PenaltyFamily::BigML1: return {h.sigma + lambda / h.M, h.M, kInf, kInf};
    case PenaltyFamily::BigML2:
      if (lambda < 0.5 * h.sigma * h.M * h.M) {
        const double tau = std::sqrt(2.0 * lambda * h.sigma);
        return {tau, std::sqrt(2.0 * lambda / h.sigma), tau, kInf};
      }
      return {lambda / h.M + 0.5 * h.sigma * h.M, h.M, kInf, kInf};
  }
  return {};
}

PenaltyParams generic_params(const ScalarFunction& h, const ScalarFunction& h_conj,
                             double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("lambda", "must be positive");
  constexpr double kBracketLimit = 1e12;

  PenaltyParams out;
  {
    double lo = 0.0;
    double hi = 1.0;
    while (hi <= kBracketLimit && std::isfinite(h_conj(hi))) {
      lo = hi;
      hi *= 2.0;
    }
    out.beta = hi > kBracketLimit
                   ? kInf
                   : bisect_last_true([&](double v) { return std::isfinite(h_conj(v)); }, lo, hi);
  }
  {
    double lo = 0.0;
    double hi = 1.0;
    while (hi <= kBracketLimit && h_conj(hi) <= lambda) {
      lo = hi;
      hi *= 2.0;
    }
    out.tau = hi > kBracketLimit
                  ? out.beta
                  : bisect_last_true([&](double v) { return h_conj(v) <= lambda; }, lo, hi);
  }
  out.mu = std::isfinite(out.tau) ? right_derivative(h_conj, out.tau) : kInf;
  out.kappa = std::isfinite(out.mu) ? right_derivative(h, out.mu) : kInf;
  return out;
}

PenaltyParams generic_params(const PenaltyModel& h, double lambda, Side side) {
  const double s = side == Side::Positive ? 1.0 : -1.0;
  return generic_params([&h, s](double x) { return value(h, s * x); },
                        [&h, s](double v) { return conjugate(h, s * v); }, lambda);
}

}  // namespace l0bb
