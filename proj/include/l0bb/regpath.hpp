#pragma once

#include <vector>

#include <Eigen/Dense>

#include "l0bb/bnb.hpp"
#include "l0bb/datafit.hpp"
#include "l0bb/penalty.hpp"

namespace l0bb {

/// Problem data without the l0 weight.
struct ProblemTemplate {
  Eigen::MatrixXd A;
  FittingLoss loss;
  PenaltyModel penalty;

  Problem at(double lambda) const;
};

struct PathSpec {
  int num_points = 20;
  double ratio_min = 1e-2;
  BnbOpts solver;

  void validate() const;
};

struct PathPoint {
  double lambda = 0.0;
  Solution solution;
  /// Objective of the warm start under this lambda (+inf for the first point).
  double warm_objective = kInf;
};

/// Smallest lambda for which tau(lambda) dominates A^T grad f(0), so that the
/// all-zero vector is a minimizer. Throws DegenerateError when no such
/// positive lambda exists or every lambda > 0 qualifies.
double lambda_max(const ProblemTemplate& tmpl);

/// Same threshold by bisection on lambda -> tau(lambda) (tau is
/// non-decreasing in lambda). Used where no inversion is available.
double lambda_max_bisect(const ProblemTemplate& tmpl);

/// lambda_max * ratio_min^(k / (num_points - 1)), k = 0..num_points-1.
std::vector<double> lambda_grid(double lambda_max, int num_points, double ratio_min);

/// Warm-started sequential solves along the grid.
std::vector<PathPoint> fit_path(const ProblemTemplate& tmpl, const PathSpec& spec);

}  // namespace l0bb
