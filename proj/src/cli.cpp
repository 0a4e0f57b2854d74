#include "l0bb/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>

#include "l0bb/bench.hpp"
#include "l0bb/bnb.hpp"
#include "l0bb/errors.hpp"
#include "l0bb/io.hpp"
#include "l0bb/oracle.hpp"
#include "l0bb/regpath.hpp"

namespace l0bb::cli {

namespace {

using io::Json;

struct SolverFlags {
  double gap_tol = 1e-8;
  double time_limit = kInf;
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  int threads = 1;
  std::string exploration = "bestfirst";

  void attach(CLI::App* app) {
    app->add_option("--gap-tol", gap_tol, "Relative optimality gap certified at exit");
    app->add_option("--time-limit", time_limit, "Wall-clock limit in seconds");
    app->add_option("--node-limit", node_limit, "Maximum number of explored nodes");
    app->add_option("--threads", threads, "Worker threads");
    app->add_option("--exploration", exploration, "bestfirst or depthfirst")
        ->check(CLI::IsMember({"bestfirst", "depthfirst"}));
  }

  BnbOpts opts() const {
    BnbOpts o;
    o.gap_tol = gap_tol;
    o.time_limit = time_limit;
    o.node_limit = node_limit;
    o.threads = threads;
    o.exploration = exploration == "depthfirst" ? Exploration::DepthFirst : Exploration::BestFirst;
    o.validate();
    return o;
  }
};

Json vector_json(const Eigen::VectorXd& x) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) arr.push_back(x[i]);
  return arr;
}

Json solution_json(const Solution& sol, double lambda, bool with_x) {
  Json j;
  j["lambda"] = lambda;
  j["objective"] = io::ext_real(sol.objective);
  j["lower_bound"] = io::ext_real(sol.lower_bound);
  j["gap"] = io::ext_real(sol.gap);
  if (with_x) j["x"] = vector_json(sol.x_opt);
  const std::vector<int> support = sol.support();
  j["support"] = support;
  j["nnz"] = support.size();
  j["status"] = std::string(status_name(sol.status));
  j["nodes"] = sol.nodes_explored;
  j["time_s"] = sol.wall_time;
  return j;
}

Json params_json(const PenaltyParams& prm) {
  return {{"tau", io::ext_real(prm.tau)},
          {"mu", io::ext_real(prm.mu)},
          {"kappa", io::ext_real(prm.kappa)},
          {"beta", io::ext_real(prm.beta)}};
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << j.dump(2) << '\n';
    return;
  }
  std::ofstream file(path);
  if (!file) throw ConfigError("--out", "cannot open '" + path + "' for writing");
  file << j.dump(2) << '\n';
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
}

Density density_from(const std::string& name) {
  static const std::map<std::string, Density> names = {
      {"normal", Density::Normal},
      {"laplace", Density::Laplace},
      {"exponential", Density::Exponential},
      {"halfnormal", Density::HalfNormal},
      {"gausslaplace", Density::GaussLaplace}};
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
  key.erase(std::remove(key.begin(), key.end(), '-'), key.end());
  const auto it = names.find(key);
  if (it == names.end()) throw ConfigError("--density", "unknown density '" + name + "'");
  return it->second;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Branch-and-bound solver for l0-regularized problems", "l0bb"};
  app.require_subcommand(1);

  SolverFlags solver;
  std::string problem_dir;
  std::string out_path;
  std::optional<double> lambda_flag;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one problem and print a Solution JSON");
  solve_cmd->add_option("--problem", problem_dir, "Directory with A.csv|A.bin, y.csv, config.json")->required();
  solve_cmd->add_option("--lambda", lambda_flag, "Override the lambda of config.json");
  solve_cmd->add_option("--out", out_path, "Write the JSON here instead of stdout");
  solver.attach(solve_cmd);

  int points = 20;
  double ratio_min = 1e-2;
  auto* path_cmd = app.add_subcommand("path", "Warm-started regularization path");
  path_cmd->add_option("--problem", problem_dir, "Problem directory")->required();
  auto* points_opt = path_cmd->add_option("--points", points, "Number of lambda values");
  auto* ratio_opt = path_cmd->add_option("--ratio-min", ratio_min, "Smallest lambda / lambda_max");
  path_cmd->add_option("--out", out_path, "Write the JSON here instead of stdout");
  solver.attach(path_cmd);

  int m = 500, n = 1000;
  double bernoulli_p = 0.01, rho = 0.9, snr = 10.0, gamma = 1.0, gamma2 = 1.0;
  std::string density = "normal";
  std::uint64_t seed = 0;
  bool binary = false;
  auto* gen_cmd = app.add_subcommand("gen", "Write a Bernoulli-mixture problem directory");
  gen_cmd->add_option("--out", out_path, "Output directory")->required();
  gen_cmd->add_option("--m", m, "Rows");
  gen_cmd->add_option("--n", n, "Columns");
  gen_cmd->add_option("--p", bernoulli_p, "Probability that a coordinate is active");
  gen_cmd->add_option("--rho", rho, "Correlation between neighbouring columns");
  gen_cmd->add_option("--snr", snr, "Signal-to-noise ratio");
  gen_cmd->add_option("--density", density,
                      "normal, laplace, exponential, halfnormal or gausslaplace");
  gen_cmd->add_option("--gamma", gamma, "Amplitude scale");
  gen_cmd->add_option("--gamma2", gamma2, "l1 scale of gausslaplace");
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_flag("--binary", binary, "Store A in the binary container");

  std::string filter;
  auto* bench_cmd = app.add_subcommand("bench", "Run the acceptance checks");
  bench_cmd->add_option("--filter", filter, "Only checks whose name contains this text");

  std::string config_path;
  auto* params_cmd = app.add_subcommand("params", "Print tau, mu, kappa, beta and lambda_max");
  params_cmd->add_option("--config", config_path, "config.json with penalty and lambda");
  params_cmd->add_option("--problem", problem_dir, "Problem directory (adds lambda_max)");
  params_cmd->add_option("--lambda", lambda_flag, "Override the lambda of the config");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*solve_cmd) {
      const BnbOpts opts = solver.opts();
      io::ProblemFile pf = io::load_problem(problem_dir);
      const double lambda = lambda_flag ? *lambda_flag : pf.config.lambda.value_or(-1.0);
      if (!(lambda > 0.0)) throw ConfigError("config.lambda", "missing or not positive");
      const Problem p(std::move(pf.A), FittingLoss(pf.config.loss, std::move(pf.y)),
                      L0Regularizer(lambda, pf.config.penalty));
      const Solution sol = solve(p, opts);
      emit(solution_json(sol, lambda, true), out_path, out);
      return sol.status == Status::Optimal ? kExitOk : kExitLimit;
    }
    if (*path_cmd) {
      PathSpec spec;
      spec.solver = solver.opts();
      io::ProblemFile pf = io::load_problem(problem_dir);
      spec.num_points = points_opt->count() ? points : pf.config.num_points.value_or(points);
      spec.ratio_min = ratio_opt->count() ? ratio_min : pf.config.ratio_min.value_or(ratio_min);
      const ProblemTemplate tmpl{std::move(pf.A), FittingLoss(pf.config.loss, std::move(pf.y)),
                                 pf.config.penalty};
      const auto path = fit_path(tmpl, spec);
      Json arr = Json::array();
      bool all_optimal = true;
      for (const PathPoint& pt : path) {
        arr.push_back(solution_json(pt.solution, pt.lambda, false));
        all_optimal = all_optimal && pt.solution.status == Status::Optimal;
      }
      emit(arr, out_path, out);
      return all_optimal ? kExitOk : kExitLimit;
    }
    if (*gen_cmd) {
      const DensitySpec spec{density_from(density), gamma, gamma2};
      MixtureInstance inst = gen_bernoulli_mixture(m, n, bernoulli_p, rho, spec, snr, seed);
      const MappedPenalty map = map_penalty_from_density(spec, inst.zeta, bernoulli_p);
      io::ProblemFile pf{std::move(inst.A), inst.y, {}};
      pf.config.loss = LossFamily::LeastSquares;
      pf.config.penalty = map.penalty;
      pf.config.lambda = map.lambda;
      io::save_problem(out_path, pf, binary);
      io::write_vector_csv(std::filesystem::path(out_path) / "x_true.csv", inst.x_true);
      out << Json{{"dir", out_path}, {"zeta", inst.zeta}, {"lambda", map.lambda},
                  {"penalty", io::penalty_to_json(map.penalty)}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }
    if (*bench_cmd) {
      const auto results = bench::run(out, filter);
      if (results.empty()) throw ConfigError("--filter", "no check matches '" + filter + "'");
      const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
      return ok ? kExitOk : kExitLimit;
    }
    if (*params_cmd) {
      io::Config config;
      std::optional<io::ProblemFile> pf;
      if (!problem_dir.empty()) {
        pf = io::load_problem(problem_dir);
        config = pf->config;
      } else if (!config_path.empty()) {
        config = io::config_from_json(read_json_file(config_path));
      } else {
        throw ConfigError("--config", "either --config or --problem is required");
      }
      const double lambda = lambda_flag ? *lambda_flag : config.lambda.value_or(-1.0);
      if (!(lambda > 0.0)) throw ConfigError("config.lambda", "missing or not positive");
      Json j = params_json(compute_params(config.penalty, lambda));
      if (!config.penalty.is_even()) {
        j["negative"] = params_json(compute_params(config.penalty, lambda, Side::Negative));
      }
      if (pf) {
        const ProblemTemplate tmpl{pf->A, FittingLoss(config.loss, pf->y), config.penalty};
        try {
          j["lambda_max"] = lambda_max(tmpl);
        } catch (const DegenerateError& e) {
          j["lambda_max"] = nullptr;
          j["lambda_max_note"] = e.what();
        }
      }
      out << j.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DimensionError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace l0bb::cli
