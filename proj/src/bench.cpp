#include "l0bb/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <random>
#include <sstream>

#include "l0bb/bnb.hpp"
#include "l0bb/errors.hpp"
#include "l0bb/oracle.hpp"
#include "l0bb/regpath.hpp"

namespace l0bb::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// |a - b| / max(|a|, |b|), exact on equal infinities.
double pure_rel_err(double a, double b) {
  if (a == b) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd A(m, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i) A(i, j) = normal(rng);
  return A;
}

// Responses from a sparse planted vector; labels for the classification losses.
Eigen::VectorXd planted_response(std::mt19937_64& rng, const Eigen::MatrixXd& A, LossFamily loss,
                                 int k) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = static_cast<int>(A.cols());
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < std::min(k, n); ++j) {
    const double mag = uniform(rng, 1.0, 2.0);
    x[idx[static_cast<std::size_t>(j)]] = normal(rng) < 0.0 ? -mag : mag;
  }
  Eigen::VectorXd y = A * x;
  const double noise = 0.5 * y.norm() / std::sqrt(static_cast<double>(A.rows()));
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise * normal(rng);
  if (loss != LossFamily::LeastSquares) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = y[i] >= 0.0 ? 1.0 : -1.0;
  }
  return y;
}

PenaltyModel random_penalty(std::mt19937_64& rng, int family) {
  switch (family) {
    case 0: return PenaltyModel::big_m(log_uniform(rng, 0.2, 5.0));
    case 1: return PenaltyModel::l1(log_uniform(rng, 0.1, 3.0));
    case 2: return PenaltyModel::power(log_uniform(rng, 0.1, 3.0), uniform(rng, 1.2, 4.0));
    case 3: return PenaltyModel::l1_l2(log_uniform(rng, 0.1, 3.0), log_uniform(rng, 0.1, 3.0));
    case 4: return PenaltyModel::big_m_l1(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 3.0));
    case 5: return PenaltyModel::big_m_l2(log_uniform(rng, 0.2, 5.0), log_uniform(rng, 0.1, 3.0));
    case 6: return PenaltyModel::positive_l1(log_uniform(rng, 0.1, 3.0));
    default: return PenaltyModel::positive_l2(log_uniform(rng, 0.1, 3.0));
  }
}

template <typename Body>
CheckResult timed(const std::string& name, double budget, Body body) {
  CheckResult r;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    std::ostringstream detail;
    r.passed = body(detail);
    r.detail = detail.str();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = seconds_since(t0);
  if (r.seconds > budget) {
    r.passed = false;
    std::ostringstream extra;
    extra << "; runtime " << r.seconds << " s exceeds budget " << budget << " s";
    r.detail += extra.str();
  }
  return r;
}

bool same_bits(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

Problem oracle_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto loss = static_cast<LossFamily>(seed % 3);
  Eigen::MatrixXd A = gaussian_matrix(rng, 30, 12);
  Eigen::VectorXd y = planted_response(rng, A, loss, 3);
  PenaltyModel h;
  switch ((seed / 3) % 4) {
    case 0: h = PenaltyModel::big_m(3.0); break;
    case 1: h = PenaltyModel::big_m_l2(3.0, 0.5); break;
    case 2: h = PenaltyModel::l1_l2(0.2, 0.5); break;
    default: h = PenaltyModel::power(0.5, 2.0); break;
  }
  ProblemTemplate tmpl{std::move(A), FittingLoss(loss, std::move(y)), h};
  const double lambda = 0.1 * lambda_max(tmpl);
  return tmpl.at(lambda);
}

CheckResult check_oracle_suite() {
  return timed("oracle_suite", 300.0, [](std::ostringstream& d) {
    double worst = 0.0;
    int failures = 0;
    std::int64_t nodes = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Problem p = oracle_instance(seed);
      const Solution sol = solve(p);
      const SupportFit ref = exhaustive_solve(p);
      const double err = rel_err(sol.objective, ref.objective);
      worst = std::max(worst, err);
      nodes += sol.nodes_explored;
      if (!(err <= 1e-6) || sol.status != Status::Optimal) {
        ++failures;
        d << "seed " << seed << ": bnb " << sol.objective << " vs oracle " << ref.objective
          << " (" << status_name(sol.status) << "); ";
      }
    }
    d << "60 instances, max rel err " << worst << ", " << nodes << " nodes total";
    return failures == 0;
  });
}

CheckResult check_param_table() {
  return timed("param_table", 10.0, [](std::ostringstream& d) {
    std::mt19937_64 rng(20240601);
    const char* rows[] = {"BigM", "L1", "PowerP", "L1L2", "BigML1", "BigML2<", "BigML2>="};
    double worst = 0.0;
    int failures = 0;
    for (int row = 0; row < 7; ++row) {
      for (int draw = 0; draw < 50; ++draw) {
        const double M = log_uniform(rng, 0.1, 10.0);
        const double sigma = log_uniform(rng, 0.1, 10.0);
        const double sigma2 = log_uniform(rng, 0.1, 10.0);
        const double p = uniform(rng, 1.2, 4.0);
        double lambda = log_uniform(rng, 1e-2, 10.0);
        PenaltyModel h;
        switch (row) {
          case 0: h = PenaltyModel::big_m(M); break;
          case 1: h = PenaltyModel::l1(sigma); break;
          case 2: h = PenaltyModel::power(sigma, p); break;
          case 3: h = PenaltyModel::l1_l2(sigma, sigma2); break;
          case 4: h = PenaltyModel::big_m_l1(M, sigma); break;
          case 5:
            h = PenaltyModel::big_m_l2(M, sigma);
            lambda = uniform(rng, 0.05, 0.95) * 0.5 * sigma * M * M;
            break;
          default:
            h = PenaltyModel::big_m_l2(M, sigma);
            lambda = uniform(rng, 1.05, 20.0) * 0.5 * sigma * M * M;
            break;
        }
        const PenaltyParams closed = compute_params(h, lambda);
        const PenaltyParams generic = generic_params(h, lambda);
        const double err = std::max({pure_rel_err(closed.tau, generic.tau),
                                     pure_rel_err(closed.mu, generic.mu),
                                     pure_rel_err(closed.kappa, generic.kappa)});
        worst = std::max(worst, err);
        if (!(err <= 1e-8)) {
          if (failures < 5) {
            d << rows[row] << " draw " << draw << ": closed (" << closed.tau << ", " << closed.mu
              << ", " << closed.kappa << ") generic (" << generic.tau << ", " << generic.mu
              << ", " << generic.kappa << "); ";
          }
          ++failures;
        }
      }
    }
    d << "7 rows x 50 draws, max rel err " << worst << ", " << failures << " failures";
    return failures == 0;
  });
}

CheckResult check_special_cases() {
  return timed("special_cases", 1.0, [](std::ostringstream& d) {
    std::mt19937_64 rng(7);
    int mismatches = 0;
    double worst = 0.0;
    for (int draw = 0; draw < 5; ++draw) {
      const double lambda = log_uniform(rng, 0.05, 5.0);
      const double M = log_uniform(rng, 0.2, 5.0);
      const double sigma = log_uniform(rng, 0.2, 5.0);
      const L0Regularizer big_m(lambda, PenaltyModel::big_m(M));
      const L0Regularizer l2(lambda, PenaltyModel::power(sigma, 2.0));
      const double l2_break = std::sqrt(2.0 * lambda / sigma);
      for (int k = 0; k < 10000; ++k) {
        const double t = -2.0 + 4.0 * k / 9999.0;
        // Big-M: (lambda / M)|x| on |x| <= M, +inf outside
        {
          const double x = t * M;
          const double got = biconj_value(big_m, x);
          const double want = std::abs(x) <= M ? lambda / M * std::abs(x) : kInf;
          const double err = rel_err(got, want);
          if (std::isfinite(got) != std::isfinite(want) || err > 1e-14) ++mismatches;
          if (std::isfinite(err)) worst = std::max(worst, err);
        }
        // l2: sqrt(2 lambda sigma)|x| if x^2 <= 2 lambda / sigma, sigma x^2 / 2 + lambda otherwise
        {
          const double x = t * l2_break;
          const double got = biconj_value(l2, x);
          const double want = x * x <= 2.0 * lambda / sigma ? std::sqrt(2.0 * lambda * sigma) * std::abs(x)
                                                            : 0.5 * sigma * x * x + lambda;
          const double err = rel_err(got, want);
          if (!(err <= 1e-14)) ++mismatches;
          if (std::isfinite(err)) worst = std::max(worst, err);
        }
      }
    }
    d << "5 parameter draws x 1e4 points x 2 cases, max rel err " << worst << ", " << mismatches
      << " mismatches";
    return mismatches == 0;
  });
}

CheckResult check_calculus() {
  return timed("calculus", 30.0, [](std::ostringstream& d) {
    std::mt19937_64 rng(99);
    int bad_moreau = 0, bad_fermat = 0, bad_conj = 0, bad_round = 0;
    double w_moreau = 0.0, w_fermat = 0.0, w_conj = 0.0, w_round = 0.0;
    for (int draw = 0; draw < 1000; ++draw) {
      const int family = draw % 8;
      const PenaltyModel h = random_penalty(rng, family);
      const double lambda = log_uniform(rng, 0.05, 5.0);
      const L0Regularizer r(lambda, h);
      const double tau = r.params().tau;
      const double mu = std::isfinite(r.params().mu) ? r.params().mu : 1.0;
      const double gamma = log_uniform(rng, 0.05, 5.0);
      const double x = uniform(rng, -3.0, 3.0) * (mu + gamma * tau);
      const double v = uniform(rng, -3.0, 3.0) * tau;

      // Moreau decomposition for g** / g* and for h / h*
      {
        const double lhs = biconj_prox(r, gamma, x) + gamma * conj_prox(r, 1.0 / gamma, x / gamma);
        const double lhs_h = prox(h, gamma, x) + gamma * conjugate_prox(h, 1.0 / gamma, x / gamma);
        const double err = std::max(std::abs(lhs - x), std::abs(lhs_h - x)) / std::max(1.0, std::abs(x));
        w_moreau = std::max(w_moreau, err);
        if (!(err <= 1e-9)) ++bad_moreau;
      }
      // Fermat: (x - prox(x)) / gamma lies in the subdifferential at prox(x)
      {
        const double u = biconj_prox(r, gamma, x);
        const double s = (x - u) / gamma;
        const Interval sub = biconj_subdiff(r, u);
        const double uh = prox(h, gamma, x);
        const double sh = (x - uh) / gamma;
        const Interval subh = subdiff(h, uh);
        const double uc = conj_prox(r, gamma, v);
        const double sc = (v - uc) / gamma;
        const Interval subc = conj_subdiff(r, uc);
        auto dist = [](const Interval& I, double t) {
          if (I.contains(t)) return 0.0;
          return std::min(std::abs(t - I.lo), std::abs(t - I.hi)) / std::max(1.0, std::abs(t));
        };
        const double err = std::max({dist(sub, s), dist(subh, sh), dist(subc, sc)});
        w_fermat = std::max(w_fermat, err);
        if (!(err <= 1e-9)) ++bad_fermat;
      }
      // g* against a grid supremum of v x - g(x)
      {
        const double beta_pos = r.params(Side::Positive).beta;
        const double beta_neg = r.params(Side::Negative).beta;
        double vv = v;
        if (vv > 0.0 && std::isfinite(beta_pos)) vv = std::min(vv, 0.999 * beta_pos);
        if (vv < 0.0 && std::isfinite(beta_neg)) vv = std::max(vv, -0.999 * beta_neg);
        const Interval arg = conjugate_subdiff(h, vv);
        double reach = 1.0;
        if (std::isfinite(arg.lo)) reach = std::max(reach, std::abs(arg.lo));
        if (std::isfinite(arg.hi)) reach = std::max(reach, std::abs(arg.hi));
        reach *= 1.5;
        const double grid = numeric::grid_conjugate([&](double t) { return g_value(r, t); }, vv,
                                                    -reach, reach, 50001);
        const double exact = conj_value(r, vv);
        const double err = std::abs(grid - exact) / std::max(1.0, std::abs(exact));
        w_conj = std::max(w_conj, err);
        if (!(err <= 2e-3)) ++bad_conj;
      }
      // h** = h: sup over v of (v x - h*(v)) recovers h(x)
      {
        double xx = uniform(rng, -2.0, 2.0);
        if (h.family == PenaltyFamily::BigM || h.family == PenaltyFamily::BigML1 ||
            h.family == PenaltyFamily::BigML2) {
          xx = uniform(rng, -0.99, 0.99) * h.M;
        }
        if (!h.is_even()) xx = std::abs(xx);
        const Interval slope = subdiff(h, xx);
        double reach = 1.0;
        if (std::isfinite(slope.lo)) reach = std::max(reach, std::abs(slope.lo));
        if (std::isfinite(slope.hi)) reach = std::max(reach, std::abs(slope.hi));
        reach *= 1.5;
        auto neg = [&](double t) {
          const double c = conjugate(h, t);
          return std::isfinite(c) ? c - t * xx : kInf;
        };
        const int N = 20001;
        double best_v = 0.0;
        double best = kInf;
        for (int k = 0; k < N; ++k) {
          const double t = -reach + 2.0 * reach * k / (N - 1);
          const double val = neg(t);
          if (val < best) {
            best = val;
            best_v = t;
          }
        }
        const double step = 2.0 * reach / (N - 1);
        const double refined = numeric::golden_min(neg, best_v - step, best_v + step);
        const double biconj = -std::min(best, neg(refined));
        const double exact = value(h, xx);
        const double err = std::abs(biconj - exact) / std::max(1.0, std::abs(exact));
        w_round = std::max(w_round, err);
        if (!(err <= 1e-4)) {
          if (bad_round < 3) {
            d << "h** " << family_name(h.family) << " (M " << h.M << ", sigma " << h.sigma
              << ", sigma2 " << h.sigma2 << ", p " << h.p << ") at x " << xx << ": " << biconj
              << " vs " << exact << "; ";
          }
          ++bad_round;
        }
      }
    }
    d << "1000 draws; moreau max " << w_moreau << " (" << bad_moreau << " bad), fermat max "
      << w_fermat << " (" << bad_fermat << "), g* grid max " << w_conj << " (" << bad_conj
      << "), h** max " << w_round << " (" << bad_round << ")";
    return bad_moreau + bad_fermat + bad_conj + bad_round == 0;
  });
}

CheckResult check_weak_duality() {
  return timed("weak_duality", 600.0, [](std::ostringstream& d) {
    std::mt19937_64 rng(4242);
    std::normal_distribution<double> normal(0.0, 1.0);
    int violations = 0;
    int finite = 0;
    int cases = 0;
    double worst = -kInf;
    for (int k = 0; k < 100; ++k) {
      const auto loss = static_cast<LossFamily>(k % 3);
      Eigen::MatrixXd A = gaussian_matrix(rng, 20, 15);
      Eigen::VectorXd y = planted_response(rng, A, loss, 4);
      const PenaltyModel h = random_penalty(rng, (k / 3) % 8);
      const Problem p(std::move(A), FittingLoss(loss, std::move(y)), L0Regularizer(log_uniform(rng, 0.01, 2.0), h));
      Node node = Node::root(15);
      for (auto& f : node.fix) {
        const double u = uniform(rng, 0.0, 1.0);
        f = u < 0.25 ? Fix::Zero : (u < 0.5 ? Fix::One : Fix::Free);
      }
      Eigen::VectorXd warm(15);
      for (int i = 0; i < 15; ++i) {
        warm[i] = 0.3 * normal(rng);
        if (!h.is_even()) warm[i] = std::abs(warm[i]);
      }
      const RelaxResult conv = solve_relaxation(p, node, warm, SolveOpts{0.0, 1e-13, 1000000});
      for (int max_inner : {1, 5, 50}) {
        const RelaxResult early = solve_relaxation(p, node, warm, SolveOpts{0.0, 0.0, max_inner});
        ++cases;
        if (std::isfinite(early.dual_lb)) ++finite;
        const double excess = early.dual_lb - conv.primal;
        worst = std::max(worst, excess);
        if (!(excess <= 1e-7)) {
          ++violations;
          d << "node " << k << " max_inner " << max_inner << ": dual " << early.dual_lb
            << " > optimum " << conv.primal << "; ";
        }
      }
    }
    d << cases << " cases (" << finite << " finite bounds), max dual - optimum " << worst << ", "
      << violations << " violations";
    return violations == 0;
  });
}

CheckResult check_path() {
  return timed("path", 120.0, [](std::ostringstream& d) {
    const MixtureInstance inst =
        gen_bernoulli_mixture(50, 40, 0.1, 0.5, DensitySpec{Density::Normal, 1.0, 1.0}, 10.0, 11);
    ProblemTemplate tmpl{inst.A, FittingLoss(LossFamily::LeastSquares, inst.y),
                         PenaltyModel::big_m_l2(5.0, 0.1)};
    PathSpec spec;
    spec.num_points = 20;
    spec.ratio_min = 1e-2;
    spec.solver.gap_tol = 1e-8;
    const auto path = fit_path(tmpl, spec);
    bool ok = path.size() == 20 && path.front().solution.support().empty();
    std::int64_t nodes = 0;
    for (const PathPoint& pt : path) {
      nodes += pt.solution.nodes_explored;
      if (pt.solution.status != Status::Optimal) {
        ok = false;
        d << "lambda " << pt.lambda << " ended " << status_name(pt.solution.status) << "; ";
      }
    }
    d << path.size() << " points, first nnz " << path.front().solution.support().size()
      << ", last nnz " << path.back().solution.support().size() << ", " << nodes << " nodes";
    return ok;
  });
}

CheckResult check_mixture() {
  return timed("mixture", 180.0, [](std::ostringstream& d) {
    const std::vector<DensitySpec> densities = {
        {Density::Normal, 1.0, 1.0},      {Density::Laplace, 1.0, 1.0},
        {Density::Exponential, 1.0, 1.0}, {Density::HalfNormal, 1.0, 1.0},
        {Density::GaussLaplace, 1.0, 1.0}};
    const double bp = 0.05;
    bool ok = true;
    BnbOpts opts;
    opts.time_limit = 60.0;
    for (const DensitySpec& density : densities) {
      std::uint64_t seed = 0;
      std::optional<MixtureInstance> inst;
      while (!inst) {
        try {
          inst = gen_bernoulli_mixture(100, 50, bp, 0.9, density, 10.0, seed);
        } catch (const ConfigError&) {
          ++seed;  // no amplitude drawn; try the next seed
        }
      }
      const MappedPenalty map = map_penalty_from_density(density, inst->zeta, bp);
      const Problem p(inst->A, FittingLoss(LossFamily::LeastSquares, inst->y),
                      L0Regularizer(map.lambda, map.penalty));
      const Solution sol = solve(p, opts);
      d << density_name(density.kind) << ": " << status_name(sol.status) << " in "
        << sol.nodes_explored << " nodes, " << std::setprecision(3) << sol.wall_time << " s; ";
      if (sol.status != Status::Optimal) ok = false;
    }
    for (Density kind : {Density::Normal, Density::Laplace}) {
      const DensitySpec density{kind, 1.0, 1.0};
      int compared = 0;
      int agree = 0;
      for (std::uint64_t seed = 0; compared < 5 && seed < 1000; ++seed) {
        std::optional<MixtureInstance> inst;
        try {
          inst = gen_bernoulli_mixture(100, 12, bp, 0.9, density, 10.0, seed);
        } catch (const ConfigError&) {
          continue;
        }
        const MappedPenalty map = map_penalty_from_density(density, inst->zeta, bp);
        const Problem p(inst->A, FittingLoss(LossFamily::LeastSquares, inst->y),
                        L0Regularizer(map.lambda, map.penalty));
        const Solution sol = solve(p, opts);
        const SupportFit ref = exhaustive_solve(p);
        std::vector<int> ref_support;
        for (Eigen::Index i = 0; i < ref.x.size(); ++i)
          if (ref.x[i] != 0.0) ref_support.push_back(static_cast<int>(i));
        ++compared;
        if (sol.support() == ref_support && sol.status == Status::Optimal) ++agree;
      }
      d << density_name(kind) << " n=12 supports " << agree << "/" << compared << "; ";
      if (agree != compared || compared == 0) ok = false;
    }
    return ok;
  });
}

CheckResult check_determinism() {
  return timed("determinism", 600.0, [](std::ostringstream& d) {
    int differ = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Problem p = oracle_instance(seed);
      const Solution a = solve(p);
      const Solution b = solve(p);
      if (a.nodes_explored != b.nodes_explored || !same_bits(a.x_opt, b.x_opt)) {
        ++differ;
        d << "seed " << seed << " differs; ";
      }
    }
    d << "60 instances run twice, " << differ << " differ";
    return differ == 0;
  });
}

const std::vector<NamedCheck>& all_checks() {
  static const std::vector<NamedCheck> checks = {
      {"oracle_suite", check_oracle_suite}, {"param_table", check_param_table},
      {"special_cases", check_special_cases}, {"calculus", check_calculus},
      {"weak_duality", check_weak_duality}, {"path", check_path},
      {"mixture", check_mixture},           {"determinism", check_determinism}};
  return checks;
}

std::vector<CheckResult> run(std::ostream& out, const std::string& filter) {
  std::vector<CheckResult> results;
  for (const NamedCheck& check : all_checks()) {
    if (!filter.empty() && check.name.find(filter) == std::string::npos) continue;
    CheckResult r = check.run();
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << std::fixed << std::setprecision(2)
        << r.seconds << " s) " << std::defaultfloat << std::setprecision(6) << r.detail << '\n';
    out.flush();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace l0bb::bench
