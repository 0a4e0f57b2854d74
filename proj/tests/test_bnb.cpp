#include <doctest.h>

#include <cmath>
#include <random>

#include "l0bb/bnb.hpp"
#include "l0bb/errors.hpp"
#include "l0bb/oracle.hpp"
#include "l0bb/regpath.hpp"
#include "support.hpp"

using namespace l0bb;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<PenaltyModel> penalties() {
  return {PenaltyModel::big_m(3.0),        PenaltyModel::l1(0.3),          PenaltyModel::power(0.5, 2.0),
          PenaltyModel::power(0.4, 1.5),   PenaltyModel::l1_l2(0.2, 0.5),  PenaltyModel::big_m_l1(3.0, 0.2),
          PenaltyModel::big_m_l2(3.0, 0.5), PenaltyModel::positive_l1(0.3), PenaltyModel::positive_l2(0.5)};
}

const LossFamily kLosses[] = {LossFamily::LeastSquares, LossFamily::Logistic, LossFamily::SquaredHinge};

/// 3-sparse planted signal with positive amplitudes, lambda a fraction of lambda_max.
Problem planted(std::uint64_t seed, int m, int n, LossFamily family, const PenaltyModel& h, double frac = 0.1) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd A = testing::gaussian(rng, m, n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::uniform_real_distribution<double> amp(1.0, 2.0);
  for (int k = 0; k < 3; ++k) x[static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n))] = amp(rng);
  Eigen::VectorXd w = A * x;
  std::normal_distribution<double> noise(0.0, 0.5 * w.norm() / std::sqrt(m));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] += noise(rng);
  if (family != LossFamily::LeastSquares) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = w[i] >= 0.0 ? 1.0 : -1.0;
  }
  ProblemTemplate tmpl{A, FittingLoss(family, w), h};
  double lambda = 1.0;
  try {
    lambda = frac * lambda_max(tmpl);
  } catch (const DegenerateError&) {
  }
  return tmpl.at(lambda);
}

Node with_fix(std::initializer_list<Fix> fs) {
  Node node;
  node.fix.assign(fs.begin(), fs.end());
  return node;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("branch picks the largest free magnitude") {
  const Node root = Node::root(3);
  auto [z, o] = branch(root, vec({0.9, 0.1, 0.0}));
  CHECK(z.fix == std::vector<Fix>{Fix::Zero, Fix::Free, Fix::Free});
  CHECK(o.fix == std::vector<Fix>{Fix::One, Fix::Free, Fix::Free});
  CHECK((*z.warm)[0] == 0.0);
  CHECK((*o.warm)[0] == 0.9);
  CHECK(z.depth == 1);

  auto [z2, o2] = branch(Node::root(2), vec({0.5, -0.5}));
  CHECK(z2.fix[0] == Fix::Zero);
  CHECK(o2.fix[0] == Fix::One);

  auto [z3, o3] = branch(with_fix({Fix::Zero, Fix::Free, Fix::Free}), vec({0.0, 0.0, 0.0}));
  CHECK(z3.fix[1] == Fix::Zero);
  CHECK(o3.fix[1] == Fix::One);

  auto [z4, o4] = branch(with_fix({Fix::Free, Fix::One, Fix::Free}), vec({0.2, 5.0, -0.3}));
  CHECK(z4.fix[2] == Fix::Zero);

  CHECK_THROWS_AS(branch(with_fix({Fix::Zero, Fix::One}), vec({1.0, 1.0})), BranchError);
}

TEST_CASE("node queue ordering") {
  auto node = [](double lb, int tag) {
    Node n = Node::root(1);
    n.lb = lb;
    n.depth = tag;
    return n;
  };
  NodeQueue best(Exploration::BestFirst);
  best.push(node(2.0, 0));
  best.push(node(1.0, 1));
  best.push(node(1.0, 2));
  CHECK(best.min_lb() == 1.0);
  CHECK(best.pop().depth == 1);
  CHECK(best.pop().depth == 2);
  CHECK(best.pop().depth == 0);
  CHECK(best.empty());
  CHECK(best.min_lb() == testing::kInf);

  NodeQueue deep(Exploration::DepthFirst);
  deep.push(node(1.0, 0));
  deep.push(node(5.0, 1));
  deep.push(node(3.0, 2));
  CHECK(deep.min_lb() == 1.0);
  CHECK(deep.pop().depth == 2);
  CHECK(deep.pop().depth == 1);
  CHECK(deep.pop().depth == 0);
}

TEST_CASE("zero data gives the zero solution") {
  for (const auto& h : penalties()) {
    const Problem p(Eigen::MatrixXd::Ones(1, 1), FittingLoss(LossFamily::LeastSquares, vec({0})),
                    L0Regularizer(1.0, h));
    const Solution s = solve(p);
    CHECK(s.x_opt[0] == 0.0);
    CHECK(s.objective == 0.0);
    CHECK(s.nodes_explored <= 3);
    CHECK(s.status == Status::Optimal);
  }
}

TEST_CASE("lambda at or above lambda_max gives zero") {
  for (LossFamily family : kLosses) {
    for (const auto& h : penalties()) {
      if (!h.is_even() || h.family == PenaltyFamily::L1) continue;
      const Problem p = planted(7, 20, 8, family, h, 1.0);
      const Solution s = solve(p);
      CAPTURE(loss_name(family));
      CAPTURE(family_name(h.family));
      CHECK(s.x_opt.cwiseAbs().maxCoeff() == 0.0);
      CHECK(s.objective == doctest::Approx(value(p.loss(), Eigen::VectorXd::Zero(p.rows()))).epsilon(1e-12));
    }
  }
}

TEST_CASE("solve matches the exhaustive oracle on every loss and penalty") {
  std::uint64_t seed = 100;
  for (LossFamily family : kLosses) {
    for (const auto& h : penalties()) {
      for (double frac : {0.05, 0.3}) {
        const Problem p = planted(seed++, 20, 9, family, h, frac);
        const Solution s = solve(p);
        const SupportFit ref = exhaustive_solve(p);
        CAPTURE(loss_name(family));
        CAPTURE(family_name(h.family));
        CAPTURE(frac);
        CHECK(s.status == Status::Optimal);
        CHECK(rel_err(s.objective, ref.objective) <= 1e-6);
        CHECK(s.lower_bound <= ref.objective + 1e-9 * std::max(1.0, std::abs(ref.objective)));
        CHECK(s.objective == p.objective(s.x_opt));
        CHECK(s.gap <= 1e-8);
      }
    }
  }
}

TEST_CASE("BigM+L2 30x12 matches the oracle") {
  const Problem p = planted(42, 30, 12, LossFamily::LeastSquares, PenaltyModel::big_m_l2(3.0, 0.5));
  CHECK(rel_err(solve(p).objective, exhaustive_solve(p).objective) <= 1e-6);
}

TEST_CASE("pruned subtrees hold nothing better than the incumbent") {
  std::uint64_t seed = 300;
  for (LossFamily family : kLosses) {
    for (const auto& h : {PenaltyModel::big_m(3.0), PenaltyModel::l1_l2(0.2, 0.5), PenaltyModel::positive_l2(0.5)}) {
      const int n = 8;
      const Problem p = planted(seed++, 16, n, family, h, 0.05);
      // Subproblem value of every support: lambda is charged on the whole support.
      std::vector<double> best(std::size_t{1} << n);
      for (std::uint32_t mask = 0; mask < best.size(); ++mask) {
        std::vector<int> support;
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1u) support.push_back(i);
        const SupportFit fit = restricted_solve(p, support);
        const long nnz = (fit.x.array() != 0.0).count();
        best[mask] = fit.objective + p.reg().lambda() * static_cast<double>(static_cast<long>(support.size()) - nnz);
      }
      BnbTrace trace;
      BnbOpts opts;
      opts.gap_tol = 1e-10;
      opts.trace = &trace;
      const Solution s = solve(p, opts);
      CAPTURE(loss_name(family));
      CAPTURE(family_name(h.family));
      int pruned = 0;
      for (const NodeEvent& e : trace.events) {
        if (e.kind != NodeEvent::Kind::Pruned) continue;
        ++pruned;
        std::uint32_t zero = 0, one = 0;
        for (int i = 0; i < n; ++i) {
          if (e.fix[static_cast<std::size_t>(i)] == Fix::Zero) zero |= 1u << i;
          if (e.fix[static_cast<std::size_t>(i)] == Fix::One) one |= 1u << i;
        }
        double sub = testing::kInf;
        for (std::uint32_t mask = 0; mask < best.size(); ++mask) {
          if ((mask & zero) == 0 && (mask & one) == one) sub = std::min(sub, best[mask]);
        }
        CHECK(sub >= e.ub - 1e-9 * std::max(1.0, std::abs(e.ub)));
      }
      CHECK(pruned > 0);
      for (std::size_t k = 1; k < trace.events.size(); ++k) CHECK(trace.events[k].ub <= trace.events[k - 1].ub);
    }
  }
}

TEST_CASE("single-threaded runs are deterministic") {
  const Problem p = planted(9, 30, 12, LossFamily::Logistic, PenaltyModel::l1_l2(0.2, 0.5));
  BnbTrace t1, t2;
  BnbOpts opts;
  opts.trace = &t1;
  const Solution a = solve(p, opts);
  opts.trace = &t2;
  const Solution b = solve(p, opts);
  CHECK(a.nodes_explored == b.nodes_explored);
  CHECK((a.x_opt.array() == b.x_opt.array()).all());
  REQUIRE(t1.events.size() == t2.events.size());
  for (std::size_t k = 0; k < t1.events.size(); ++k) {
    CHECK(t1.events[k].seq == t2.events[k].seq);
    CHECK(t1.events[k].fix == t2.events[k].fix);
  }
}

TEST_CASE("two threads certify the same optimum") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Problem p = planted(seed, 30, 12, static_cast<LossFamily>(seed % 3), PenaltyModel::big_m_l2(3.0, 0.5));
    const Solution one = solve(p);
    BnbOpts opts;
    opts.threads = 2;
    const Solution two = solve(p, opts);
    CHECK(two.status == Status::Optimal);
    CHECK(rel_err(two.objective, one.objective) <= 1e-8);
  }
}

TEST_CASE("depth-first exploration reaches the same optimum") {
  const Problem p = planted(14, 25, 10, LossFamily::SquaredHinge, PenaltyModel::power(0.5, 2.0));
  BnbOpts opts;
  opts.exploration = Exploration::DepthFirst;
  CHECK(rel_err(solve(p, opts).objective, exhaustive_solve(p).objective) <= 1e-6);
}

TEST_CASE("limits are reported") {
  const Problem p = planted(15, 30, 12, LossFamily::LeastSquares, PenaltyModel::big_m(3.0), 0.02);
  BnbOpts opts;
  opts.node_limit = 1;
  const Solution s = solve(p, opts);
  CHECK(s.nodes_explored <= 1);
  CHECK((s.status == Status::NodeLimit || s.status == Status::GapReached || s.status == Status::Optimal));
  CHECK(s.objective == p.objective(s.x_opt));
  CHECK(s.lower_bound <= s.objective);
}

TEST_CASE("invalid options are rejected") {
  const Problem p = planted(16, 10, 4, LossFamily::LeastSquares, PenaltyModel::big_m(3.0));
  BnbOpts opts;
  opts.gap_tol = -1.0;
  CHECK_THROWS_AS(solve(p, opts), ConfigError);
  opts = BnbOpts{};
  opts.threads = 0;
  CHECK_THROWS_AS(solve(p, opts), ConfigError);
  opts = BnbOpts{};
  opts.node_limit = 0;
  CHECK_THROWS_AS(solve(p, opts), ConfigError);
}

TEST_CASE("upper_bound_heuristic examples") {
  const Problem p = planted(17, 12, 6, LossFamily::LeastSquares, PenaltyModel::big_m_l2(3.0, 0.5));
  const Incumbent zero = upper_bound_heuristic(p, Node::root(6), Eigen::VectorXd::Zero(6));
  CHECK(zero.x_best.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.ub == value(p.loss(), Eigen::VectorXd::Zero(12)));

  const SupportFit opt = exhaustive_solve(p);
  std::mt19937_64 rng(18);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x_hat(6);
    for (Eigen::Index i = 0; i < 6; ++i) x_hat[i] = normal(rng) * (rng() % 2);
    const Incumbent c = upper_bound_heuristic(p, Node::root(6), x_hat);
    CHECK(c.ub == p.objective(c.x_best));
    CHECK(c.ub >= opt.objective - 1e-9);
    std::vector<int> support;
    for (int i = 0; i < 6; ++i)
      if (x_hat[i] != 0.0) support.push_back(i);
    CHECK(c.ub == doctest::Approx(restricted_solve(p, support).objective).epsilon(1e-9));
  }
}
