#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "l0bb/relax.hpp"

namespace l0bb {

enum class Exploration { BestFirst, DepthFirst };
enum class Status { Optimal, GapReached, NodeLimit, TimeLimit };

std::string_view status_name(Status status);
std::string_view exploration_name(Exploration exploration);

/// What happened to a node when it was taken off the open set.
struct NodeEvent {
  enum class Kind { Pruned, Branched, Leaf };
  std::vector<Fix> fix;
  double lb = -kInf;
  double ub = kInf;
  Kind kind = Kind::Pruned;
  std::uint64_t seq = 0;
};

/// Optional record of a run, for post-hoc verification.
struct BnbTrace {
  std::vector<NodeEvent> events;
};

struct BnbOpts {
  /// Relative gap (ub - lb) / max(1, |ub|) certified at termination.
  double gap_tol = 1e-8;
  double time_limit = kInf;  // seconds
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  Exploration exploration = Exploration::BestFirst;
  int threads = 1;
  SolveOpts relax;
  /// Options for the restricted convex solve that polishes incumbents.
  SolveOpts polish{0.0, 1e-11, 100000};
  /// Root warm start, also offered as the initial incumbent.
  std::optional<Eigen::VectorXd> warm_start;
  BnbTrace* trace = nullptr;

  void validate() const;
};

struct Incumbent {
  Eigen::VectorXd x_best;
  double ub = kInf;
};

struct Solution {
  Eigen::VectorXd x_opt;
  double objective = kInf;
  double lower_bound = -kInf;
  double gap = kInf;
  std::int64_t nodes_explored = 0;
  double wall_time = 0.0;  // seconds
  Status status = Status::Optimal;

  std::vector<int> support() const;
};

/// Open-node container: best-first on lb or depth-first, ties broken by
/// insertion order.
class NodeQueue {
 public:
  explicit NodeQueue(Exploration exploration) : exploration_(exploration) {}

  void push(Node node);
  Node pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  /// Smallest lb among open nodes (+inf when empty).
  double min_lb() const;

 private:
  struct Order {
    Exploration exploration;
    bool operator()(const Node& a, const Node& b) const;
  };

  Exploration exploration_;
  std::vector<Node> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Children (S0 + i*, S1) and (S0, S1 + i*) on i* = argmax over free i of |x_hat_i|.
std::pair<Node, Node> branch(const Node& node, const Eigen::VectorXd& x_hat);

/// Threshold x_hat to a support, then minimize f(Ax) + sum_{i in S} h(x_i) on it.
Incumbent upper_bound_heuristic(const Problem& p, const Node& node, const Eigen::VectorXd& x_hat,
                                const SolveOpts& polish = SolveOpts{0.0, 1e-11, 100000});

Solution solve(const Problem& p, const BnbOpts& opts = {});

}  // namespace l0bb
