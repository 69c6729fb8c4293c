#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "smirl/oracle/micro_cmp.hpp"

namespace smirl::oracle {

/// Exact sufficient statistic of D_t for the Bernoulli model over one-hot
/// states: the current state, how often each state occurs in D_t, and t.
struct BeliefNode {
  std::size_t state = 0;
  std::vector<int> counts;
  std::size_t t = 0;

  friend auto operator<=>(const BeliefNode&, const BeliefNode&) = default;
};

inline BeliefNode root_node(const MicroCmp& cmp) {
  BeliefNode root;
  root.state = cmp.initial_state;
  root.counts.assign(cmp.states, 0);
  root.counts[cmp.initial_state] = 1;
  return root;
}

inline BeliefNode child_node(const BeliefNode& node, std::size_t next) {
  BeliefNode child = node;
  child.state = next;
  child.counts[next] += 1;
  child.t += 1;
  return child;
}

/// log p_theta(one_hot(next)) with theta_i = (count_i + alpha) / (n + 2 alpha),
/// n = |D_t| = t + 1. Evaluated from counts, independent of the density module.
inline double transition_reward(const BeliefNode& node, std::size_t next, double alpha) {
  const double n = static_cast<double>(node.t + 1);
  double r = 0.0;
  for (std::size_t i = 0; i < node.counts.size(); ++i) {
    const double theta = (node.counts[i] + alpha) / (n + 2.0 * alpha);
    r += (i == next) ? std::log(theta) : std::log1p(-theta);
  }
  return r;
}

using NodePolicy = std::map<BeliefNode, std::size_t>;
/// Action distribution at a node; must sum to one.
using StochasticPolicy = std::function<std::vector<double>(const BeliefNode&)>;

struct Solution {
  double value = 0.0;  // V* at the root
  NodePolicy policy;   // argmax action at every node reachable under some policy
  std::map<BeliefNode, double> values;
};

inline constexpr double kTieTolerance = 1e-12;

namespace detail {

inline double solve_node(const MicroCmp& cmp, double alpha, const BeliefNode& node, Solution& sol) {
  if (node.t == cmp.horizon) return 0.0;
  if (auto it = sol.values.find(node); it != sol.values.end()) return it->second;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_action = 0;
  for (std::size_t a = 0; a < cmp.actions; ++a) {
    double q = 0.0;
    for (std::size_t next = 0; next < cmp.states; ++next) {
      const double p = cmp.prob(node.state, a, next);
      if (p == 0.0) continue;
      q += p * (transition_reward(node, next, alpha) + solve_node(cmp, alpha, child_node(node, next), sol));
    }
    // Lowest action wins ties up to round-off.
    if (a == 0 || q > best + kTieTolerance) {
      best = q;
      best_action = a;
    }
  }
  sol.values.emplace(node, best);
  sol.policy.emplace(node, best_action);
  return best;
}

}  // namespace detail

/// Backward induction over belief nodes (state, counts, t) of the
/// belief-augmented finite-horizon MDP with the smoothed Bernoulli reward.
inline Solution solve(const MicroCmp& cmp, double alpha = 1.0) {
  cmp.validate();
  require(alpha > 0.0, "oracle::solve: alpha must be > 0 for finite rewards");
  Solution sol;
  sol.value = detail::solve_node(cmp, alpha, root_node(cmp), sol);
  return sol;
}

struct PolicyEvaluation {
  double value = 0.0;                 // expected smirl return
  std::vector<double> step_rewards;   // expected r_t for t = 0..H-1
};

/// Exact expectation of the smirl return by forward propagation of the node
/// distribution.
inline PolicyEvaluation policy_eval(const MicroCmp& cmp, const StochasticPolicy& policy, double alpha = 1.0) {
  cmp.validate();
  PolicyEvaluation ev;
  ev.step_rewards.assign(cmp.horizon, 0.0);
  std::map<BeliefNode, double> layer{{root_node(cmp), 1.0}};
  for (std::size_t t = 0; t < cmp.horizon; ++t) {
    std::map<BeliefNode, double> next_layer;
    for (const auto& [node, mass] : layer) {
      const std::vector<double> pa = policy(node);
      require_dim(pa.size(), cmp.actions, "policy_eval action distribution");
      for (std::size_t a = 0; a < cmp.actions; ++a) {
        if (pa[a] == 0.0) continue;
        for (std::size_t next = 0; next < cmp.states; ++next) {
          const double p = cmp.prob(node.state, a, next);
          if (p == 0.0) continue;
          const double w = mass * pa[a] * p;
          ev.step_rewards[t] += w * transition_reward(node, next, alpha);
          next_layer[child_node(node, next)] += w;
        }
      }
    }
    layer = std::move(next_layer);
  }
  for (double r : ev.step_rewards) ev.value += r;
  return ev;
}

inline StochasticPolicy deterministic(const NodePolicy& table, std::size_t actions) {
  return [&table, actions](const BeliefNode& node) {
    auto it = table.find(node);
    if (it == table.end()) throw ContractError("policy_eval: policy undefined at a reachable node");
    std::vector<double> pa(actions, 0.0);
    pa.at(it->second) = 1.0;
    return pa;
  };
}

inline StochasticPolicy constant_action(std::size_t action, std::size_t actions) {
  return [action, actions](const BeliefNode&) {
    std::vector<double> pa(actions, 0.0);
    pa.at(action) = 1.0;
    return pa;
  };
}

inline StochasticPolicy uniform_policy(std::size_t actions) {
  return [actions](const BeliefNode&) { return std::vector<double>(actions, 1.0 / static_cast<double>(actions)); };
}

inline PolicyEvaluation policy_eval(const MicroCmp& cmp, const NodePolicy& table, double alpha = 1.0) {
  return policy_eval(cmp, deterministic(table, cmp.actions), alpha);
}

}  // namespace smirl::oracle
