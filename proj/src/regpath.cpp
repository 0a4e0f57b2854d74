#include "l0bb/regpath.hpp"

#include <cmath>

#include "l0bb/errors.hpp"

namespace l0bb {

namespace {

// Magnitude tau(lambda) must reach for the zero vector to be optimal.
double zero_threshold(const ProblemTemplate& tmpl) {
  const Eigen::VectorXd corr =
      tmpl.A.transpose() * gradient(tmpl.loss, Eigen::VectorXd::Zero(tmpl.A.rows()));
  double t = 0.0;
  if (tmpl.penalty.is_even()) {
    t = corr.cwiseAbs().maxCoeff();
  } else {
    // only x_i >= 0 is admissible: the constraint bites on negative correlations
    t = pos_part((-corr).maxCoeff());
  }
  if (!(t > 0.0)) {
    throw DegenerateError("lambda_max is 0: the zero vector is optimal for every lambda > 0");
  }
  return t;
}

[[noreturn]] void throw_constant_slope(double slope, double t) {
  if (slope >= t) {
    throw DegenerateError("lambda_max is 0: the zero vector is optimal for every lambda > 0");
  }
  throw DegenerateError("no lambda makes the zero vector optimal: tau does not reach " +
                        std::to_string(t));
}

}  // namespace

Problem ProblemTemplate::at(double lambda) const {
  return Problem(A, loss, L0Regularizer(lambda, penalty));
}

void PathSpec::validate() const {
  if (num_points < 1) throw ConfigError("points", "must be >= 1");
  if (!(ratio_min > 0.0 && ratio_min <= 1.0)) throw ConfigError("ratio_min", "must lie in (0, 1]");
  solver.validate();
}

double lambda_max(const ProblemTemplate& tmpl) {
  const double t = zero_threshold(tmpl);
  const PenaltyModel& h = tmpl.penalty;
  switch (h.family) {
    case PenaltyFamily::BigM: return h.M * t;
    case PenaltyFamily::L1:
    case PenaltyFamily::PositiveL1: throw_constant_slope(h.sigma, t);
    case PenaltyFamily::PowerP:
      return (h.p - 1.0) / h.p * h.sigma * std::pow(t / h.sigma, h.p / (h.p - 1.0));
    case PenaltyFamily::PositiveL2: return t * t / (2.0 * h.sigma);
    case PenaltyFamily::L1L2: {
      if (t <= h.sigma) throw_constant_slope(h.sigma, t);
      const double d = t - h.sigma;
      return d * d / (2.0 * h.sigma2);
    }
    case PenaltyFamily::BigML1:
      if (t <= h.sigma) throw_constant_slope(h.sigma, t);
      return h.M * (t - h.sigma);
    case PenaltyFamily::BigML2:
      if (t < h.sigma * h.M) return t * t / (2.0 * h.sigma);
      return h.M * (t - 0.5 * h.sigma * h.M);
  }
  return lambda_max_bisect(tmpl);
}

double lambda_max_bisect(const ProblemTemplate& tmpl) {
  const double t = zero_threshold(tmpl);
  auto reaches = [&](double lambda) { return compute_params(tmpl.penalty, lambda).tau >= t; };
  if (reaches(1e-300)) throw_constant_slope(t, t);
  double lo = 1e-300;
  double hi = 1.0;
  while (!reaches(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw_constant_slope(0.0, t);
  }
  while (hi - lo > 1e-14 * hi) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (reaches(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> lambda_grid(double lambda_max, int num_points, double ratio_min) {
  if (num_points < 1) throw ConfigError("points", "must be >= 1");
  if (!(ratio_min > 0.0 && ratio_min <= 1.0)) throw ConfigError("ratio_min", "must lie in (0, 1]");
  std::vector<double> grid(static_cast<std::size_t>(num_points));
  const double log_top = std::log(lambda_max);
  const double log_ratio = std::log(ratio_min);
  for (int k = 0; k < num_points; ++k) {
    const double frac = num_points == 1 ? 0.0 : static_cast<double>(k) / (num_points - 1);
    grid[static_cast<std::size_t>(k)] = std::exp(log_top + frac * log_ratio);
  }
  grid.front() = lambda_max;
  return grid;
}

std::vector<PathPoint> fit_path(const ProblemTemplate& tmpl, const PathSpec& spec) {
  spec.validate();
  const std::vector<double> grid = lambda_grid(lambda_max(tmpl), spec.num_points, spec.ratio_min);
  std::vector<PathPoint> path;
  path.reserve(grid.size());
  std::optional<Eigen::VectorXd> previous;
  for (double lambda : grid) {
    const Problem p = tmpl.at(lambda);
    BnbOpts opts = spec.solver;
    PathPoint point;
    point.lambda = lambda;
    if (previous) {
      opts.warm_start = previous;
      point.warm_objective = p.objective(*previous);
    }
    point.solution = solve(p, opts);
    previous = point.solution.x_opt;
    path.push_back(std::move(point));
  }
  return path;
}

}  // namespace l0bb
