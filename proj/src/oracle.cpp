#include "l0bb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "l0bb/errors.hpp"

namespace l0bb {

namespace {

const SolveOpts kRestricted{0.0, 1e-10, 200000};

SupportFit solve_mask(const Problem& p, std::uint64_t mask, std::optional<Eigen::VectorXd>& warm) {
  SupportFit fit;
  if (mask == 0) {
    fit.x = Eigen::VectorXd::Zero(p.cols());
  } else {
    Node node = Node::root(p.cols());
    for (std::size_t i = 0; i < node.fix.size(); ++i) {
      node.fix[i] = (mask >> i) & 1u ? Fix::One : Fix::Zero;
    }
    fit.x = solve_relaxation(p, node, warm, kRestricted).x_hat;
    warm = fit.x;
  }
  fit.objective = p.objective(fit.x);
  return fit;
}

struct Best {
  SupportFit fit;
  std::uint64_t mask = 0;
};

Best scan(const Problem& p, std::uint64_t begin, std::uint64_t end) {
  Best best;
  std::optional<Eigen::VectorXd> warm;
  for (std::uint64_t mask = begin; mask < end; ++mask) {
    SupportFit fit = solve_mask(p, mask, warm);
    if (fit.objective < best.fit.objective) best = {std::move(fit), mask};
  }
  return best;
}

double exponential(std::mt19937_64& rng, double scale) {
  return std::exponential_distribution<double>(1.0 / scale)(rng);
}

double amplitude(std::mt19937_64& rng, const DensitySpec& d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (d.kind) {
    case Density::Normal: return d.gamma * normal(rng);
    case Density::Laplace: {
      const double mag = exponential(rng, d.gamma);
      return unit(rng) < 0.5 ? -mag : mag;
    }
    case Density::Exponential: return exponential(rng, d.gamma);
    case Density::HalfNormal: return std::abs(d.gamma * normal(rng));
    case Density::GaussLaplace:
      // N(0, gamma^2) proposal, accept with exp(-|x| / gamma2)
      while (true) {
        const double x = d.gamma * normal(rng);
        if (unit(rng) <= std::exp(-std::abs(x) / d.gamma2)) return x;
      }
  }
  return 0.0;
}

void validate_density(const DensitySpec& d) {
  if (!(d.gamma > 0.0) || !std::isfinite(d.gamma)) throw ConfigError("density.gamma", "must be positive");
  if (d.kind == Density::GaussLaplace && (!(d.gamma2 > 0.0) || !std::isfinite(d.gamma2))) {
    throw ConfigError("density.gamma2", "must be positive");
  }
}

}  // namespace

SupportFit restricted_solve(const Problem& p, const std::vector<int>& support) {
  Node node = Node::root(p.cols());
  std::fill(node.fix.begin(), node.fix.end(), Fix::Zero);
  bool any = false;
  for (int i : support) {
    if (i < 0 || i >= p.cols()) throw DimensionError("support index out of range");
    node.fix[static_cast<std::size_t>(i)] = Fix::One;
    any = true;
  }
  SupportFit fit;
  if (!any) {
    fit.x = Eigen::VectorXd::Zero(p.cols());
  } else {
    fit.x = solve_relaxation(p, node, std::nullopt, kRestricted).x_hat;
  }
  fit.objective = p.objective(fit.x);
  return fit;
}

SupportFit exhaustive_solve(const Problem& p, int max_n, int threads) {
  const Eigen::Index n = p.cols();
  if (n > max_n || n > 62) {
    throw SizeError("exhaustive_solve: n = " + std::to_string(n) + " exceeds max_n = " +
                    std::to_string(max_n));
  }
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  const std::uint64_t total = std::uint64_t{1} << n;
  const std::uint64_t chunks = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), total);
  std::vector<Best> results(chunks);
  auto range = [&](std::uint64_t c) { return std::pair{total * c / chunks, total * (c + 1) / chunks}; };
  if (chunks == 1) {
    results[0] = scan(p, 0, total);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      pool.emplace_back([&, c] {
        auto [b, e] = range(c);
        results[c] = scan(p, b, e);
      });
    }
    for (auto& t : pool) t.join();
  }
  // chunks cover increasing masks, so strict < keeps the smallest mask on ties
  Best best = std::move(results[0]);
  for (std::uint64_t c = 1; c < chunks; ++c) {
    if (results[c].fit.objective < best.fit.objective) best = std::move(results[c]);
  }
  return best.fit;
}

std::string_view density_name(Density density) {
  switch (density) {
    case Density::Normal: return "Normal";
    case Density::Laplace: return "Laplace";
    case Density::Exponential: return "Exponential";
    case Density::HalfNormal: return "HalfNormal";
    case Density::GaussLaplace: return "GaussLaplace";
  }
  return "unknown";
}

MixtureInstance gen_bernoulli_mixture(int m, int n, double bernoulli_p, double rho,
                                      const DensitySpec& density, double snr,
                                      std::uint64_t seed) {
  if (m < 1) throw ConfigError("m", "must be >= 1");
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (!(bernoulli_p >= 0.0 && bernoulli_p <= 1.0)) throw ConfigError("bernoulli_p", "must lie in [0, 1]");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ConfigError("rho", "must lie in [0, 1]");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw ConfigError("snr", "must be positive");
  validate_density(density);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(bernoulli_p);

  MixtureInstance inst;
  inst.A.resize(m, n);
  const double innov = std::sqrt(1.0 - rho * rho);
  for (int r = 0; r < m; ++r) {
    double prev = normal(rng);
    inst.A(r, 0) = prev;
    for (int j = 1; j < n; ++j) {
      prev = rho * prev + innov * normal(rng);
      inst.A(r, j) = prev;
    }
  }
  inst.x_true = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (coin(rng)) inst.x_true[i] = amplitude(rng, density);
  }
  const Eigen::VectorXd signal = inst.A * inst.x_true;
  const double norm = signal.norm();
  if (!(norm > 0.0)) throw ConfigError("bernoulli_p", "zero signal: no amplitude was drawn");
  inst.zeta = norm / std::sqrt(snr * m);
  inst.y = signal;
  for (int r = 0; r < m; ++r) inst.y[r] += inst.zeta * normal(rng);
  return inst;
}

MappedPenalty map_penalty_from_density(const DensitySpec& density, double zeta,
                                       double bernoulli_p) {
  validate_density(density);
  if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ConfigError("zeta", "must be positive");
  if (!(bernoulli_p > 0.0 && bernoulli_p < 0.5)) {
    throw ConfigError("bernoulli_p", "must lie in (0, 1/2) so that lambda > 0");
  }
  const double z2 = zeta * zeta;
  const double g = density.gamma;
  MappedPenalty out;
  out.lambda = z2 * std::log((1.0 - bernoulli_p) / bernoulli_p);
  switch (density.kind) {
    case Density::Normal: out.penalty = PenaltyModel::power(z2 / (g * g), 2.0); break;
    case Density::Laplace: out.penalty = PenaltyModel::l1(z2 / g); break;
    case Density::Exponential: out.penalty = PenaltyModel::positive_l1(z2 / g); break;
    case Density::HalfNormal: out.penalty = PenaltyModel::positive_l2(z2 / (g * g)); break;
    case Density::GaussLaplace:
      out.penalty = PenaltyModel::l1_l2(z2 / density.gamma2, z2 / (g * g));
      break;
  }
  return out;
}

namespace numeric {

double golden_min(const Fn& fn, double lo, double hi, int iters) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int k = 0; k < iters && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  // the best evaluated point, which stays inside the domain when fn is +inf past a boundary
  return fc <= fd ? c : d;
}

double grid_conjugate(const Fn& fn, double v, double lo, double hi, int N) {
  double best = -kInf;
  for (int k = 0; k < N; ++k) {
    // exact at both ends and, for symmetric ranges, at the midpoint
    const double t = static_cast<double>(k) / (N - 1);
    const double x = lo * (1.0 - t) + hi * t;
    const double fx = fn(x);
    if (std::isfinite(fx)) best = std::max(best, v * x - fx);
  }
  return best;
}

double central_diff(const Fn& fn, double x, double step) {
  return (fn(x + step) - fn(x - step)) / (2.0 * step);
}

}  // namespace numeric

}  // namespace l0bb
