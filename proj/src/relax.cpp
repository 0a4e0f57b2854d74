#include "l0bb/relax.hpp"

#include <cmath>
#include <string>

#include "l0bb/errors.hpp"

namespace l0bb {

namespace {

// a_i^T grad f(w) without materializing the gradient.
double column_gradient(const FittingLoss& f, const double* a, const Eigen::VectorXd& w) {
  const Eigen::Index m = w.size();
  const double* y = f.y().data();
  double acc = 0.0;
  switch (f.family()) {
    case LossFamily::LeastSquares:
      for (Eigen::Index j = 0; j < m; ++j) acc += a[j] * (w[j] - y[j]);
      return acc;
    default:
      for (Eigen::Index j = 0; j < m; ++j) acc += a[j] * f.partial(j, w[j]);
      return acc;
  }
}

double scaled_dual_bound(const Problem& p, const Node& node, const Eigen::VectorXd& v) {
  const double raw = dual_bound(p, node, v);
  if (raw > -kInf) return raw;
  double t = dual_feasible_scale(p, node, v);
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double scaled = dual_bound(p, node, t * v);
    if (scaled > -kInf) return scaled;
    t *= 1.0 - 1e-12 * std::ldexp(1.0, 4 * attempt);
  }
  return dual_bound(p, node, Eigen::VectorXd::Zero(v.size()));
}

}  // namespace

Problem::Problem(Eigen::MatrixXd A, FittingLoss loss, L0Regularizer reg)
    : A_(std::move(A)), loss_(std::move(loss)), reg_(reg) {
  if (A_.rows() < 1 || A_.cols() < 1) throw DimensionError("A must have at least one row and column");
  if (A_.rows() != loss_.size()) {
    throw DimensionError("A has " + std::to_string(A_.rows()) + " rows but y has length " +
                         std::to_string(loss_.size()));
  }
  if (!A_.allFinite()) throw ConfigError("A", "all entries must be finite");
  column_norms_ = A_.colwise().squaredNorm().transpose();
}

double Problem::objective(const Eigen::VectorXd& x) const {
  if (x.size() != cols()) throw DimensionError("x has wrong length");
  double total = value(loss_, A_ * x);
  for (Eigen::Index i = 0; i < x.size(); ++i) total += g_value(reg_, x[i]);
  return total;
}

Problem Problem::with_lambda(double lambda) const {
  return Problem(A_, loss_, L0Regularizer(lambda, reg_.penalty()));
}

Node Node::root(Eigen::Index n) {
  Node node;
  node.fix.assign(static_cast<std::size_t>(n), Fix::Free);
  return node;
}

std::vector<int> Node::S0() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fix.size(); ++i)
    if (fix[i] == Fix::Zero) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Node::S1() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fix.size(); ++i)
    if (fix[i] == Fix::One) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Node::free_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fix.size(); ++i)
    if (fix[i] == Fix::Free) out.push_back(static_cast<int>(i));
  return out;
}

bool Node::has_free() const {
  for (Fix f : fix)
    if (f == Fix::Free) return true;
  return false;
}

double node_reg_prox(const L0Regularizer& reg, Fix fix, double gamma, double x) {
  switch (fix) {
    case Fix::Zero: return 0.0;
    case Fix::One: return prox(reg.penalty(), gamma, x);
    case Fix::Free: return biconj_prox(reg, gamma, x);
  }
  return 0.0;
}

double node_reg_prox(const Problem& p, const Node& node, int i, double gamma, double x) {
  return node_reg_prox(p.reg(), node.fix.at(static_cast<std::size_t>(i)), gamma, x);
}

double node_reg_value(const L0Regularizer& reg, Fix fix, double x) {
  switch (fix) {
    case Fix::Zero: return x == 0.0 ? 0.0 : kInf;
    case Fix::One: return value(reg.penalty(), x) + reg.lambda();
    case Fix::Free: return biconj_value(reg, x);
  }
  return kInf;
}

double relaxed_objective(const Problem& p, const Node& node, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& w) {
  double total = value(p.loss(), w);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total += node_reg_value(p.reg(), node.fix[static_cast<std::size_t>(i)], x[i]);
  }
  return total;
}

Eigen::VectorXd dual_point(const Problem& p, const Eigen::VectorXd& x_hat) {
  if (x_hat.size() != p.cols()) throw DimensionError("x_hat has wrong length");
  return -gradient(p.loss(), p.A() * x_hat);
}

double dual_bound(const Problem& p, const Node& node, const Eigen::VectorXd& v) {
  if (v.size() != p.rows()) throw DimensionError("dual point has wrong length");
  const double fconj = conjugate(p.loss(), -v);
  if (!std::isfinite(fconj)) return -kInf;
  const Eigen::VectorXd corr = p.A().transpose() * v;
  const L0Regularizer& reg = p.reg();
  double total = -fconj;
  double lambda_count = 0.0;
  for (Eigen::Index i = 0; i < corr.size(); ++i) {
    switch (node.fix[static_cast<std::size_t>(i)]) {
      case Fix::Zero: break;
      case Fix::One: {
        const double hc = conjugate(reg.penalty(), corr[i]);
        if (!std::isfinite(hc)) return -kInf;
        total -= hc;
        lambda_count += 1.0;
        break;
      }
      case Fix::Free: {
        const double gc = conj_value(reg, corr[i]);
        if (!std::isfinite(gc)) return -kInf;
        total -= gc;
        break;
      }
    }
  }
  return total + reg.lambda() * lambda_count;
}

double dual_feasible_scale(const Problem& p, const Node& node, const Eigen::VectorXd& v) {
  const Eigen::VectorXd corr = p.A().transpose() * v;
  const double beta_pos = p.reg().params(Side::Positive).beta;
  const double beta_neg = p.reg().params(Side::Negative).beta;
  double t = 1.0;
  for (Eigen::Index i = 0; i < corr.size(); ++i) {
    if (node.fix[static_cast<std::size_t>(i)] == Fix::Zero) continue;
    const double c = corr[i];
    const double limit = c > 0.0 ? beta_pos : beta_neg;
    if (std::abs(c) > limit) t = std::min(t, limit / std::abs(c));
  }
  return t;
}

RelaxResult solve_relaxation(const Problem& p, const Node& node,
                             const std::optional<Eigen::VectorXd>& warm, const SolveOpts& opts) {
  const Eigen::Index n = p.cols();
  if (static_cast<Eigen::Index>(node.fix.size()) != n) throw DimensionError("node has wrong size");
  RelaxResult res;
  res.x_hat = Eigen::VectorXd::Zero(n);
  if (warm) {
    if (warm->size() != n) throw DimensionError("warm start has wrong length");
    res.x_hat = *warm;
  }

  std::vector<int> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Fix fix = node.fix[static_cast<std::size_t>(i)];
    if (fix == Fix::Zero || p.column_norms()[i] == 0.0) {
      res.x_hat[i] = 0.0;
    } else {
      active.push_back(static_cast<int>(i));
    }
  }
  res.w = p.A() * res.x_hat;

  const L0Regularizer& reg = p.reg();
  const double L = curvature_bound(p.loss());
  std::vector<double> steps(active.size());
  for (std::size_t k = 0; k < active.size(); ++k) {
    steps[k] = 1.0 / (L * p.column_norms()[active[k]]);
  }

  while (true) {
    double max_move = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const int i = active[k];
      const double* a = p.A().col(i).data();
      const double gamma = steps[k];
      const double xi = res.x_hat[i];
      const double grad = column_gradient(p.loss(), a, res.w);
      const double u = node_reg_prox(reg, node.fix[static_cast<std::size_t>(i)], gamma,
                                     xi - gamma * grad);
      const double delta = u - xi;
      if (delta != 0.0) {
        res.w += delta * p.A().col(i);
        res.x_hat[i] = u;
        max_move = std::max(max_move, std::abs(delta));
      }
    }
    ++res.inner_iters;

    res.primal = relaxed_objective(p, node, res.x_hat, res.w);
    if (!std::isfinite(res.primal)) {
      throw NumericalError("relaxation objective became non-finite after " +
                           std::to_string(res.inner_iters) + " sweeps");
    }
    if (opts.record_history) res.history.push_back(res.primal);

    const Eigen::VectorXd v = -gradient(p.loss(), res.w);
    res.dual_lb = std::max(res.dual_lb, scaled_dual_bound(p, node, v));

    if (res.primal - res.dual_lb <= opts.gap_tol * std::max(1.0, std::abs(res.primal))) {
      res.converged = true;
      break;
    }
    if (res.dual_lb > opts.cutoff) break;
    if (max_move < opts.cd_tol) {
      res.converged = true;
      break;
    }
    if (res.inner_iters >= opts.max_inner) break;
  }
  return res;
}

}  // namespace l0bb
