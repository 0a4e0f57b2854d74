#include "l0bb/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "l0bb/errors.hpp"

namespace l0bb {

std::string_view status_name(Status status) {
  switch (status) {
    case Status::Optimal: return "Optimal";
    case Status::GapReached: return "GapReached";
    case Status::NodeLimit: return "NodeLimit";
    case Status::TimeLimit: return "TimeLimit";
  }
  return "unknown";
}

std::string_view exploration_name(Exploration exploration) {
  return exploration == Exploration::BestFirst ? "bestfirst" : "depthfirst";
}

void BnbOpts::validate() const {
  if (!(gap_tol >= 0.0) || !std::isfinite(gap_tol)) throw ConfigError("gap_tol", "must be >= 0");
  if (!(time_limit > 0.0)) throw ConfigError("time_limit", "must be positive");
  if (node_limit < 1) throw ConfigError("node_limit", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (relax.max_inner < 1) throw ConfigError("max_inner", "must be >= 1");
  if (!(relax.gap_tol >= 0.0)) throw ConfigError("relax.gap_tol", "must be >= 0");
  if (!(relax.cd_tol >= 0.0)) throw ConfigError("cd_tol", "must be >= 0");
}

std::vector<int> Solution::support() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < x_opt.size(); ++i)
    if (x_opt[i] != 0.0) out.push_back(static_cast<int>(i));
  return out;
}

bool NodeQueue::Order::operator()(const Node& a, const Node& b) const {
  // true when a has lower priority than b
  if (exploration == Exploration::DepthFirst) return a.seq < b.seq;
  if (a.lb != b.lb) return a.lb > b.lb;
  return a.seq > b.seq;
}

void NodeQueue::push(Node node) {
  node.seq = next_seq_++;
  heap_.push_back(std::move(node));
  std::push_heap(heap_.begin(), heap_.end(), Order{exploration_});
}

Node NodeQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), Order{exploration_});
  Node node = std::move(heap_.back());
  heap_.pop_back();
  return node;
}

double NodeQueue::min_lb() const {
  if (heap_.empty()) return kInf;
  if (exploration_ == Exploration::BestFirst) return heap_.front().lb;
  double lb = kInf;
  for (const Node& node : heap_) lb = std::min(lb, node.lb);
  return lb;
}

std::pair<Node, Node> branch(const Node& node, const Eigen::VectorXd& x_hat) {
  if (static_cast<Eigen::Index>(node.fix.size()) != x_hat.size()) {
    throw DimensionError("branch: x_hat has wrong length");
  }
  int best = -1;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < node.fix.size(); ++i) {
    if (node.fix[i] != Fix::Free) continue;
    const double mag = std::abs(x_hat[static_cast<Eigen::Index>(i)]);
    if (mag > best_mag) {
      best_mag = mag;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) throw BranchError("branch: node has no free index");

  Node zero_child;
  zero_child.fix = node.fix;
  zero_child.fix[static_cast<std::size_t>(best)] = Fix::Zero;
  zero_child.depth = node.depth + 1;
  zero_child.lb = node.lb;
  auto zero_warm = std::make_shared<Eigen::VectorXd>(x_hat);
  (*zero_warm)[best] = 0.0;
  zero_child.warm = std::move(zero_warm);

  Node one_child;
  one_child.fix = node.fix;
  one_child.fix[static_cast<std::size_t>(best)] = Fix::One;
  one_child.depth = node.depth + 1;
  one_child.lb = node.lb;
  one_child.warm = std::make_shared<const Eigen::VectorXd>(x_hat);
  return {std::move(zero_child), std::move(one_child)};
}

namespace {

std::vector<bool> threshold_support(const Node& node, const Eigen::VectorXd& x_hat) {
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < x_hat.size(); ++i) {
    if (node.fix[static_cast<std::size_t>(i)] != Fix::Zero) max_abs = std::max(max_abs, std::abs(x_hat[i]));
  }
  const double tol = 1e-8 * max_abs;
  std::vector<bool> support(node.fix.size(), false);
  for (std::size_t i = 0; i < node.fix.size(); ++i) {
    const double mag = std::abs(x_hat[static_cast<Eigen::Index>(i)]);
    support[i] = node.fix[i] == Fix::One || (node.fix[i] == Fix::Free && mag > tol && mag > 0.0);
  }
  return support;
}

Incumbent polish_support(const Problem& p, const std::vector<bool>& support,
                         const Eigen::VectorXd& x_hat, const SolveOpts& polish) {
  Node restricted = Node::root(p.cols());
  Eigen::VectorXd warm = x_hat;
  bool any = false;
  for (std::size_t i = 0; i < support.size(); ++i) {
    restricted.fix[i] = support[i] ? Fix::One : Fix::Zero;
    if (!support[i]) warm[static_cast<Eigen::Index>(i)] = 0.0;
    any = any || support[i];
  }
  Incumbent out;
  if (!any) {
    out.x_best = Eigen::VectorXd::Zero(p.cols());
  } else {
    out.x_best = solve_relaxation(p, restricted, warm, polish).x_hat;
  }
  out.ub = p.objective(out.x_best);
  return out;
}

using Clock = std::chrono::steady_clock;

class Search {
 public:
  Search(const Problem& p, const BnbOpts& opts) : p_(p), opts_(opts), queue_(opts.exploration) {}

  Solution run() {
    start_ = Clock::now();
    const Eigen::Index n = p_.cols();

    incumbent_.x_best = Eigen::VectorXd::Zero(n);
    incumbent_.ub = p_.objective(incumbent_.x_best);
    Node root = Node::root(n);
    if (opts_.warm_start) {
      if (opts_.warm_start->size() != n) throw ConfigError("warm_start", "wrong length");
      const double warm_obj = p_.objective(*opts_.warm_start);
      if (warm_obj < incumbent_.ub) {
        incumbent_.x_best = *opts_.warm_start;
        incumbent_.ub = warm_obj;
      }
      root.warm = std::make_shared<const Eigen::VectorXd>(*opts_.warm_start);
    }
    queue_.push(std::move(root));

    if (opts_.threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < opts_.threads; ++t) pool.emplace_back([this] { worker(); });
      for (auto& th : pool) th.join();
    }

    Solution sol;
    sol.x_opt = incumbent_.x_best;
    sol.objective = incumbent_.ub;
    sol.lower_bound = std::min({incumbent_.ub, closed_lb_, queue_.min_lb()});
    sol.gap = pos_part(sol.objective - sol.lower_bound) / std::max(1.0, std::abs(sol.objective));
    sol.nodes_explored = explored_;
    sol.wall_time = elapsed();
    if (!limit_hit_) {
      sol.status = Status::Optimal;
    } else if (sol.gap <= opts_.gap_tol) {
      sol.status = Status::GapReached;
    } else {
      sol.status = limit_status_;
    }
    return sol;
  }

 private:
  struct Outcome {
    double lb = -kInf;
    bool pruned = false;
    Eigen::VectorXd x_hat;
    std::optional<Incumbent> candidate;
  };

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  double tolerance(double ub) const { return opts_.gap_tol * std::max(1.0, std::abs(ub)); }

  void worker() {
    std::unique_lock<std::mutex> lock(mutex_);
    while (true) {
      cv_.wait(lock, [&] { return stop_ || !queue_.empty() || busy_ == 0; });
      if (stop_) return;
      if (queue_.empty()) {
        // busy_ == 0 here: the tree is exhausted
        stop_ = true;
        cv_.notify_all();
        return;
      }
      if (explored_ >= opts_.node_limit || elapsed() > opts_.time_limit) {
        limit_hit_ = true;
        limit_status_ = explored_ >= opts_.node_limit ? Status::NodeLimit : Status::TimeLimit;
        stop_ = true;
        cv_.notify_all();
        return;
      }
      Node node = queue_.pop();
      ++explored_;
      ++busy_;
      const double ub = incumbent_.ub;
      lock.unlock();

      Outcome out = evaluate(node, ub);

      lock.lock();
      finish(std::move(node), std::move(out));
      --busy_;
      cv_.notify_all();
    }
  }

  Outcome evaluate(const Node& node, double ub) {
    Outcome out;
    const double tol = tolerance(ub);
    if (node.lb >= ub - tol) {
      out.lb = node.lb;
      out.pruned = true;
      return out;
    }
    SolveOpts relax = opts_.relax;
    relax.cutoff = ub - tol;
    std::optional<Eigen::VectorXd> warm;
    if (node.warm) warm = *node.warm;
    RelaxResult res = solve_relaxation(p_, node, warm, relax);
    if (!node.has_free() && std::max(node.lb, res.dual_lb) < ub - tol) {
      // A leaf bound goes straight into the certificate, so close its duality
      // gap instead of stopping on small coordinate moves.
      SolveOpts tight = relax;
      tight.cd_tol = 0.0;
      tight.gap_tol = std::min(relax.gap_tol, 0.1 * opts_.gap_tol);
      tight.max_inner = std::max(relax.max_inner, 1000000);
      RelaxResult again = solve_relaxation(p_, node, res.x_hat, tight);
      if (again.dual_lb > res.dual_lb) res = std::move(again);
    }
    out.lb = std::max(node.lb, res.dual_lb);
    if (out.lb >= ub - tol) {
      out.pruned = true;
      return out;
    }
    std::vector<bool> support = threshold_support(node, res.x_hat);
    bool fresh = false;
    {
      std::lock_guard<std::mutex> guard(mutex_);
      fresh = polished_.insert(support).second;
    }
    if (fresh) out.candidate = polish_support(p_, support, res.x_hat, opts_.polish);
    out.x_hat = std::move(res.x_hat);
    return out;
  }

  // Called with the lock held.
  void finish(Node node, Outcome out) {
    if (out.candidate && out.candidate->ub < incumbent_.ub) incumbent_ = std::move(*out.candidate);
    const double ub = incumbent_.ub;
    NodeEvent::Kind kind;
    if (out.pruned || out.lb >= ub - tolerance(ub)) {
      kind = NodeEvent::Kind::Pruned;
      closed_lb_ = std::min(closed_lb_, out.lb);
    } else if (!node.has_free()) {
      kind = NodeEvent::Kind::Leaf;
      closed_lb_ = std::min(closed_lb_, out.lb);
    } else {
      kind = NodeEvent::Kind::Branched;
      node.lb = out.lb;
      auto [zero_child, one_child] = branch(node, out.x_hat);
      queue_.push(std::move(zero_child));
      queue_.push(std::move(one_child));
    }
    if (opts_.trace) {
      opts_.trace->events.push_back({node.fix, out.lb, ub, kind, node.seq});
    }
  }

  const Problem& p_;
  const BnbOpts& opts_;
  Clock::time_point start_;

  std::mutex mutex_;
  std::condition_variable cv_;
  NodeQueue queue_;
  Incumbent incumbent_;
  double closed_lb_ = kInf;
  std::int64_t explored_ = 0;
  int busy_ = 0;
  bool stop_ = false;
  bool limit_hit_ = false;
  Status limit_status_ = Status::NodeLimit;
  std::unordered_set<std::vector<bool>> polished_;
};

}  // namespace

Incumbent upper_bound_heuristic(const Problem& p, const Node& node, const Eigen::VectorXd& x_hat,
                                const SolveOpts& polish) {
  if (x_hat.size() != p.cols()) throw DimensionError("x_hat has wrong length");
  return polish_support(p, threshold_support(node, x_hat), x_hat, polish);
}

Solution solve(const Problem& p, const BnbOpts& opts) {
  opts.validate();
  Search search(p, opts);
  return search.run();
}

}  // namespace l0bb
