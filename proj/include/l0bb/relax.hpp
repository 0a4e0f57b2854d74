#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "l0bb/datafit.hpp"
#include "l0bb/l0term.hpp"

namespace l0bb {

/// min_x f(A x) + sum_i g(x_i) over a dense m x n matrix.
class Problem {
 public:
  Problem(Eigen::MatrixXd A, FittingLoss loss, L0Regularizer reg);

  const Eigen::MatrixXd& A() const { return A_; }
  const FittingLoss& loss() const { return loss_; }
  const L0Regularizer& reg() const { return reg_; }
  /// ||a_i||_2^2 per column.
  const Eigen::VectorXd& column_norms() const { return column_norms_; }
  Eigen::Index rows() const { return A_.rows(); }
  Eigen::Index cols() const { return A_.cols(); }

  /// f(A x) + sum_i g(x_i).
  double objective(const Eigen::VectorXd& x) const;

  Problem with_lambda(double lambda) const;

 private:
  Eigen::MatrixXd A_;
  FittingLoss loss_;
  L0Regularizer reg_;
  Eigen::VectorXd column_norms_;
};

/// Branching status of one coordinate.
enum class Fix : std::uint8_t { Free, Zero, One };

/// Branch-and-bound node: coordinates fixed to zero (S0), forced nonzero (S1)
/// or free.
struct Node {
  std::vector<Fix> fix;
  int depth = 0;
  double lb = -kInf;
  /// Relaxation warm start, shared between siblings. Entries on S0 are ignored.
  std::shared_ptr<const Eigen::VectorXd> warm;
  std::uint64_t seq = 0;

  static Node root(Eigen::Index n);

  std::vector<int> S0() const;
  std::vector<int> S1() const;
  std::vector<int> free_indices() const;
  bool has_free() const;
};

struct SolveOpts {
  double cd_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_inner = 100000;
  /// Stop as soon as the dual bound exceeds this value.
  double cutoff = kInf;
  bool record_history = false;
};

struct RelaxResult {
  Eigen::VectorXd x_hat;
  /// A * x_hat as maintained by the solver.
  Eigen::VectorXd w;
  double primal = kInf;
  double dual_lb = -kInf;
  int inner_iters = 0;
  bool converged = false;
  /// Relaxed objective after every sweep (record_history only).
  std::vector<double> history;
};

/// prox of gamma * (relaxed regularizer of a coordinate with the given status).
double node_reg_prox(const L0Regularizer& reg, Fix fix, double gamma, double x);
double node_reg_prox(const Problem& p, const Node& node, int i, double gamma, double x);

/// Relaxed regularizer value: eta(x = 0), h + lambda, or g**.
double node_reg_value(const L0Regularizer& reg, Fix fix, double x);

/// f(w) + sum_i relaxed regularizer(x_i).
double relaxed_objective(const Problem& p, const Node& node, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& w);

/// Cyclic proximal coordinate descent on the node relaxation, with a
/// Fenchel-Rockafellar lower bound that stays valid under early stopping.
RelaxResult solve_relaxation(const Problem& p, const Node& node,
                             const std::optional<Eigen::VectorXd>& warm, const SolveOpts& opts);

/// v = -grad f(A x_hat).
Eigen::VectorXd dual_point(const Problem& p, const Eigen::VectorXd& x_hat);

/// -f*(-v) - sum_i (conjugate of the relaxed regularizer)(a_i^T v). May be -inf.
double dual_bound(const Problem& p, const Node& node, const Eigen::VectorXd& v);

/// Largest t in [0, 1] such that t * v keeps every a_i^T (t v) inside dom h*.
double dual_feasible_scale(const Problem& p, const Node& node, const Eigen::VectorXd& v);

}  // namespace l0bb
