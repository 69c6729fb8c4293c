#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "smirl/agent/augmented_state.hpp"
#include "smirl/agent/reward.hpp"
#include "smirl/density/model.hpp"
#include "smirl/env/environment.hpp"

namespace smirl::training {

using agent::AugmentedState;
using Policy = std::function<std::size_t(const AugmentedState&)>;

/// Imitation states prepended to D_0, the density family and the reward
/// composition. The reward spec is shared across episodes (novelty counts).
struct EpisodeSetup {
  std::vector<Observation> imitation_states;
  density::DensitySpec density;
  agent::RewardSpec* reward = nullptr;
};

/// One episode. observations[t] = s_t and thetas[t] = theta_t (fitted on
/// D_t) for t = 0..T; step vectors have length T.
struct Trajectory {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::vector<Observation> observations;
  std::vector<std::vector<double>> thetas;
  std::vector<std::size_t> actions;
  std::vector<double> r_smirl;
  std::vector<double> r_task;
  std::vector<double> rewards;
  std::vector<env::Events> events;

  std::size_t length() const { return actions.size(); }

  AugmentedState augmented(std::size_t t) const {
    return {observations.at(t), thetas.at(t), static_cast<double>(t) / static_cast<double>(horizon)};
  }

  /// RL transitions carrying the composed reward; the last one is terminal.
  std::vector<agent::Transition> transitions() const {
    std::vector<agent::Transition> out;
    out.reserve(length());
    for (std::size_t t = 0; t < length(); ++t) {
      out.push_back({augmented(t), actions[t], rewards[t], augmented(t + 1), t + 1 == length()});
    }
    return out;
  }
};

/// Sum of log p_{theta_t}(s_{t+1}) over the episode.
inline double smirl_return(const Trajectory& traj) {
  return std::accumulate(traj.r_smirl.begin(), traj.r_smirl.end(), 0.0);
}

inline double task_return(const Trajectory& traj) {
  return std::accumulate(traj.r_task.begin(), traj.r_task.end(), 0.0);
}

/// D_0 = imitation states followed by s_0.
inline std::vector<Observation> initial_history(const EpisodeSetup& setup, const Observation& s0) {
  std::vector<Observation> d0 = setup.imitation_states;
  d0.push_back(s0);
  return d0;
}

/// Runs one fixed-horizon episode:
///   D_0 = imitation + {s_0}
///   for t = 0..T-1: theta_t = U(D_t); a_t = policy(s_t, theta_t, t/T); s_{t+1} ~ env;
///                   r_t = log p_{theta_t}(s_{t+1}); D_{t+1} = D_t + {s_{t+1}}
/// The density model lives only for this call.
inline Trajectory run_episode(env::Environment& env, const Policy& policy, const EpisodeSetup& setup,
                              std::uint64_t seed) {
  const env::EnvSpec spec = env.spec();
  for (const auto& s : setup.imitation_states) require_dim(s.size(), spec.obs_dim, "run_episode imitation state");
  Trajectory traj;
  traj.seed = seed;
  traj.horizon = spec.max_steps;
  traj.observations.reserve(spec.max_steps + 1);
  traj.thetas.reserve(spec.max_steps + 1);

  Observation s = env.reset(seed);
  density::DensityModel model = density::make_model(setup.density, spec.obs_dim);
  {
    const auto d0 = initial_history(setup, s);
    density::fit_reset(model, d0);
  }
  traj.observations.push_back(s);
  traj.thetas.push_back(density::theta_features(model));

  for (std::size_t t = 0; t < spec.max_steps; ++t) {
    const std::size_t a = policy(traj.augmented(t));
    env::StepOutcome out = env.step(a);
    const double r_smirl = density::log_prob(model, out.observation);
    density::update(model, out.observation);
    const double r = setup.reward != nullptr ? agent::compose_reward(*setup.reward, out.task_reward, r_smirl, out.observation)
                                             : r_smirl;
    traj.actions.push_back(a);
    traj.r_smirl.push_back(r_smirl);
    traj.r_task.push_back(out.task_reward);
    traj.rewards.push_back(r);
    traj.events.push_back(out.events);
    traj.observations.push_back(std::move(out.observation));
    traj.thetas.push_back(density::theta_features(model));
  }
  return traj;
}

/// Per-episode counters shared by training metrics and evaluation.
struct EpisodeStats {
  double smirl_return = 0.0;
  double task_return = 0.0;
  double deaths = 0.0;
  double rows_cleared = 0.0;
  double falls = 0.0;  // 1 if the agent fell at any point
  double captures = 0.0;
  double steps_in_safe_room = 0.0;
};

inline EpisodeStats episode_stats(const Trajectory& traj) {
  EpisodeStats st;
  st.smirl_return = smirl_return(traj);
  st.task_return = task_return(traj);
  for (const auto& e : traj.events) {
    st.deaths += e.death ? 1.0 : 0.0;
    st.rows_cleared += e.rows_cleared;
    st.falls = std::max(st.falls, e.fall ? 1.0 : 0.0);
    st.captures += e.capture ? 1.0 : 0.0;
    st.steps_in_safe_room += e.reached_safe_room ? 1.0 : 0.0;
  }
  return st;
}

}  // namespace smirl::training
