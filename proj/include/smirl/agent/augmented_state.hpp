#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "smirl/core/random.hpp"
#include "smirl/core/types.hpp"

namespace smirl::agent {

/// (s_t, theta_t, t / T): the Markovian state of the belief-augmented MDP.
struct AugmentedState {
  Observation observation;
  std::vector<double> theta;
  double time_frac = 0.0;

  std::size_t size() const { return observation.size() + theta.size() + 1; }

  /// [observation | theta | time_frac]
  std::vector<double> features() const {
    std::vector<double> f;
    f.reserve(size());
    f.insert(f.end(), observation.begin(), observation.end());
    f.insert(f.end(), theta.begin(), theta.end());
    f.push_back(time_frac);
    return f;
  }
};

struct Transition {
  AugmentedState state;
  std::size_t action = 0;
  double reward = 0.0;
  AugmentedState next;
  bool terminal = false;
};

/// Index of the largest value; the lowest index wins ties.
inline std::size_t greedy_action(std::span<const double> q) {
  require(!q.empty(), "greedy_action: no actions");
  std::size_t best = 0;
  for (std::size_t a = 1; a < q.size(); ++a) {
    if (q[a] > q[best]) best = a;
  }
  return best;
}

/// Uniform action with probability epsilon, greedy otherwise. Always draws
/// the coin first so the random stream does not depend on the Q-values.
inline std::size_t epsilon_greedy(std::span<const double> q, double epsilon, Rng& rng) {
  require(epsilon >= 0.0 && epsilon <= 1.0, "epsilon must be in [0, 1]");
  const double coin = uniform01(rng);
  if (coin < epsilon) return uniform_index(rng, q.size());
  return greedy_action(q);
}

/// Linear decay from `start` to `end` over the first `fraction` of training.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double fraction = 0.5;

  double at(std::size_t episode, std::size_t total_episodes) const {
    const double span = fraction * static_cast<double>(total_episodes);
    if (span <= 0.0) return end;
    const double p = std::min(1.0, static_cast<double>(episode) / span);
    return start + (end - start) * p;
  }
};

}  // namespace smirl::agent
