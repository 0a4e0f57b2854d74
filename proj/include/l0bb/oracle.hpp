#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "l0bb/penalty.hpp"
#include "l0bb/relax.hpp"

namespace l0bb {

struct SupportFit {
  Eigen::VectorXd x;
  double objective = kInf;
};

/// Minimizes f(Ax) + sum_{i in support} h(x_i) with x = 0 off the support.
/// The returned objective charges lambda only for coordinates that end up nonzero.
SupportFit restricted_solve(const Problem& p, const std::vector<int>& support);

/// Best of all 2^n supports. Ties go to the support with the smallest bitmask.
SupportFit exhaustive_solve(const Problem& p, int max_n = 16, int threads = 1);

enum class Density { Normal, Laplace, Exponential, HalfNormal, GaussLaplace };

std::string_view density_name(Density density);

/// Amplitude law of the Bernoulli mixture. gamma2 is the l1 scale of GaussLaplace.
struct DensitySpec {
  Density kind = Density::Normal;
  double gamma = 1.0;
  double gamma2 = 1.0;
};

struct MixtureInstance {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  Eigen::VectorXd x_true;
  double zeta = 0.0;  // noise standard deviation
};

/// Rows of A ~ N(0, K) with K_ij = rho^|i-j|; x_true_i = b_i s_i with
/// b_i ~ Bernoulli(p), s_i ~ density; y = A x_true + N(0, zeta^2 I) with
/// zeta = ||A x_true|| / sqrt(snr m).
MixtureInstance gen_bernoulli_mixture(int m, int n, double bernoulli_p, double rho,
                                      const DensitySpec& density, double snr,
                                      std::uint64_t seed);

struct MappedPenalty {
  PenaltyModel penalty;
  double lambda = 0.0;
};

/// MAP problem of the mixture: h = -zeta^2 log(phi / max phi), lambda = zeta^2 log((1-p)/p).
MappedPenalty map_penalty_from_density(const DensitySpec& density, double zeta,
                                       double bernoulli_p);

/// Scalar numerical oracles, independent of the closed forms.
namespace numeric {

using Fn = std::function<double(double)>;

/// Minimizer of a unimodal function on [lo, hi] by golden-section search.
/// fn may be +inf on part of the interval.
double golden_min(const Fn& fn, double lo, double hi, int iters = 200);

/// sup_x (v x - fn(x)) over an N-point uniform grid of [lo, hi].
double grid_conjugate(const Fn& fn, double v, double lo, double hi, int N);

/// Central difference derivative.
double central_diff(const Fn& fn, double x, double step = 1e-6);

}  // namespace numeric

}  // namespace l0bb
