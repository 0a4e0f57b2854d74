#include "l0bb/datafit.hpp"

#include <cmath>
#include <string>

#include "l0bb/errors.hpp"
#include "l0bb/extended.hpp"

namespace l0bb {

namespace {

void check_size(const FittingLoss& f, const Eigen::VectorXd& w) {
  if (w.size() != f.size()) {
    throw DimensionError("loss argument has length " + std::to_string(w.size()) +
                         ", expected " + std::to_string(f.size()));
  }
}

// log(1 + exp(z)) without overflow
double log1pexp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z))
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace

std::string_view loss_name(LossFamily family) {
  switch (family) {
    case LossFamily::LeastSquares: return "LeastSquares";
    case LossFamily::Logistic: return "Logistic";
    case LossFamily::SquaredHinge: return "SquaredHinge";
  }
  return "unknown";
}

FittingLoss::FittingLoss(LossFamily family, Eigen::VectorXd y)
    : family_(family), y_(std::move(y)) {
  if (y_.size() == 0) throw ConfigError("y", "must not be empty");
  for (Eigen::Index j = 0; j < y_.size(); ++j) {
    if (!std::isfinite(y_[j])) {
      throw ConfigError("y[" + std::to_string(j) + "]", "must be finite");
    }
    if (family_ != LossFamily::LeastSquares && y_[j] != 1.0 && y_[j] != -1.0) {
      throw ConfigError("y[" + std::to_string(j) + "]",
                        std::string(loss_name(family_)) + " requires labels in {-1, +1}");
    }
  }
}

double FittingLoss::partial(Eigen::Index j, double wj) const {
  const double yj = y_[j];
  switch (family_) {
    case LossFamily::LeastSquares: return wj - yj;
    case LossFamily::Logistic: return -yj * sigmoid(-yj * wj);
    case LossFamily::SquaredHinge: return -2.0 * yj * pos_part(1.0 - yj * wj);
  }
  return 0.0;
}

double value(const FittingLoss& f, const Eigen::VectorXd& w) {
  check_size(f, w);
  const Eigen::VectorXd& y = f.y();
  double total = 0.0;
  switch (f.family()) {
    case LossFamily::LeastSquares: return 0.5 * (y - w).squaredNorm();
    case LossFamily::Logistic:
      for (Eigen::Index j = 0; j < w.size(); ++j) total += log1pexp(-y[j] * w[j]);
      return total;
    case LossFamily::SquaredHinge:
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double r = pos_part(1.0 - y[j] * w[j]);
        total += r * r;
      }
      return total;
  }
  return total;
}

Eigen::VectorXd gradient(const FittingLoss& f, const Eigen::VectorXd& w) {
  check_size(f, w);
  Eigen::VectorXd g(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) g[j] = f.partial(j, w[j]);
  return g;
}

double conjugate(const FittingLoss& f, const Eigen::VectorXd& u) {
  check_size(f, u);
  const Eigen::VectorXd& y = f.y();
  double total = 0.0;
  switch (f.family()) {
    case LossFamily::LeastSquares: return 0.5 * u.squaredNorm() + u.dot(y);
    case LossFamily::Logistic:
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double s = -y[j] * u[j];
        if (s < 0.0 || s > 1.0) return kInf;
        total += xlogx(s) + xlogx(1.0 - s);
      }
      return total;
    case LossFamily::SquaredHinge:
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double t = y[j] * u[j];
        if (t > 0.0) return kInf;
        total += t + 0.25 * t * t;
      }
      return total;
  }
  return total;
}

double curvature_bound(const FittingLoss& f) {
  switch (f.family()) {
    case LossFamily::LeastSquares: return 1.0;
    case LossFamily::Logistic: return 0.25;
    case LossFamily::SquaredHinge: return 2.0;
  }
  return 1.0;
}

}  // namespace l0bb
