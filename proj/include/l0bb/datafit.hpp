#pragma once

#include <string_view>

#include <Eigen/Dense>

namespace l0bb {

enum class LossFamily { LeastSquares, Logistic, SquaredHinge };

std::string_view loss_name(LossFamily family);

/// Data-fitting term f(w), evaluated at w = A x.
///
///   LeastSquares   1/2 ||y - w||^2
///   Logistic       sum log(1 + exp(-y .* w))
///   SquaredHinge   ||[1 - y .* w]_+||^2
///
/// Logistic and SquaredHinge require labels in {-1, +1}.
class FittingLoss {
 public:
  FittingLoss(LossFamily family, Eigen::VectorXd y);

  LossFamily family() const { return family_; }
  const Eigen::VectorXd& y() const { return y_; }
  Eigen::Index size() const { return y_.size(); }

  /// Derivative of the j-th summand at w_j.
  double partial(Eigen::Index j, double wj) const;

 private:
  LossFamily family_;
  Eigen::VectorXd y_;
};

double value(const FittingLoss& f, const Eigen::VectorXd& w);
Eigen::VectorXd gradient(const FittingLoss& f, const Eigen::VectorXd& w);

/// f*(u), +inf outside dom f*.
double conjugate(const FittingLoss& f, const Eigen::VectorXd& u);

/// Lipschitz constant of the gradient.
double curvature_bound(const FittingLoss& f);

}  // namespace l0bb
