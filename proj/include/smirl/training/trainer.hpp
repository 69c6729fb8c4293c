#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smirl/core/archive.hpp"
#include "smirl/core/random.hpp"
#include "smirl/training/episode.hpp"
#include "smirl/training/experiment.hpp"

namespace smirl::training {

struct MetricsRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t episode = 0;
  EpisodeStats stats;
  double epsilon = 0.0;
  double wall_ms = 0.0;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // population
};

inline Stat mean_std(const std::vector<double>& xs) {
  Stat s;
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  for (double x : xs) s.std += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(xs.size()));
  return s;
}

struct Summary {
  std::vector<EpisodeStats> episodes;
  Stat smirl_return, task_return, deaths, rows_cleared, falls, captures, steps_in_safe_room;
};

inline Summary summarize(std::vector<EpisodeStats> eps) {
  Summary s;
  auto col = [&](double EpisodeStats::*f) {
    std::vector<double> v;
    for (const auto& e : eps) v.push_back(e.*f);
    return mean_std(v);
  };
  s.smirl_return = col(&EpisodeStats::smirl_return);
  s.task_return = col(&EpisodeStats::task_return);
  s.deaths = col(&EpisodeStats::deaths);
  s.rows_cleared = col(&EpisodeStats::rows_cleared);
  s.falls = col(&EpisodeStats::falls);
  s.captures = col(&EpisodeStats::captures);
  s.steps_in_safe_room = col(&EpisodeStats::steps_in_safe_room);
  s.episodes = std::move(eps);
  return s;
}

/// Imitation states with each entry repeated `repeat` times.
inline std::vector<Observation> expand_imitation(const ImitationConfig& im) {
  std::vector<Observation> out;
  for (const auto& s : im.states) {
    for (std::size_t k = 0; k < im.repeat; ++k) out.push_back(s);
  }
  return out;
}

inline void check_finite_trajectory(const Trajectory& traj) {
  for (std::size_t t = 0; t < traj.length(); ++t) {
    if (!std::isfinite(traj.rewards[t]) || !std::isfinite(traj.r_smirl[t])) {
      throw nn::NonFiniteError("non-finite reward at step " + std::to_string(t) +
                               " (a zero Laplace pseudo-count gives log 0 on unseen cells)");
    }
  }
}

/// One training run for one seed: owns the environment, agent, novelty
/// counts and (optionally) the VAE with its cross-episode state pool.
class SeedRun {
 public:
  SeedRun(ExperimentConfig cfg, std::uint64_t seed)
      : cfg_(std::move(cfg)),
        seed_(seed),
        env_(make_environment(cfg_.env, cfg_.max_steps)),
        reward_(make_reward_spec(cfg_.reward)),
        agent_rng_(make_rng(seed, "agent")),
        replay_rng_(make_rng(seed, "replay")),
        vae_rng_(make_rng(seed, "vae")),
        imitation_(expand_imitation(cfg_.imitation)) {
    const env::EnvSpec spec = env_->spec();
    if (cfg_.density.kind == density::DensityKind::latent) {
      require(cfg_.vae.enabled, "density kind 'latent' needs the vae block enabled");
    }
    if (cfg_.density.kind == density::DensityKind::bernoulli) {
      require(spec.obs_kind == env::ObsKind::binary, "bernoulli density needs a binary-observation environment");
    }
    Rng init = make_rng(seed, "init");
    if (cfg_.vae.enabled) {
      nn::VaeConfig vc;
      vc.obs_dim = spec.obs_dim;
      vc.latent_dim = cfg_.vae.latent_dim;
      vc.hidden = cfg_.vae.hidden;
      vc.activation = cfg_.vae.activation;
      vc.beta = cfg_.vae.beta;
      vc.reconstruction = cfg_.vae.reconstruction;
      vae_ = std::make_unique<nn::Vae>(vc, init);
      nn::AdamConfig ac;
      ac.learning_rate = cfg_.vae.learning_rate;
      vae_opt_ = std::make_unique<nn::Adam>(ac);
    }
    const std::size_t input = spec.obs_dim + density::feature_dim(density_spec(), spec.obs_dim) + 1;
    if (cfg_.agent.kind == agent::AgentKind::tabular) {
      agent_.emplace(agent::TabularAgent(spec.action_count, cfg_.agent.tabular));
    } else {
      agent_.emplace(agent::DqnAgent(input, spec.action_count, cfg_.agent.dqn, init));
    }
  }

  const ExperimentConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }
  const env::Environment& environment() const { return *env_; }
  agent::Agent& agent() { return *agent_; }
  const agent::Agent& agent() const { return *agent_; }
  const nn::Vae* vae() const { return vae_.get(); }
  const agent::RewardSpec& reward_spec() const { return reward_; }
  std::size_t episodes_done() const { return episodes_done_; }
  const std::vector<double>& vae_losses() const { return vae_losses_; }
  const std::vector<Observation>& vae_pool() const { return pool_; }
  const std::vector<Observation>& imitation_states() const { return imitation_; }

  /// Density spec for the next episode; the latent encoder is a frozen copy.
  density::DensitySpec density_spec() const {
    density::DensitySpec d;
    d.kind = cfg_.density.kind;
    d.alpha = cfg_.density.alpha;
    d.sigma_min = cfg_.density.sigma_min;
    if (d.kind == density::DensityKind::latent) {
      d.latent_dim = cfg_.vae.latent_dim;
      d.encoder = nn::frozen_encoder(*vae_);
    }
    return d;
  }

  double epsilon_at(std::size_t episode) const { return cfg_.agent.epsilon.at(episode, cfg_.episodes); }

  /// Collect one episode, update the agent, then train the VAE on the pool.
  MetricsRow train_episode() {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t ep = episodes_done_;
    const double eps = epsilon_at(ep);
    EpisodeSetup setup{imitation_, density_spec(), &reward_};
    const agent::Agent& ag = *agent_;
    Policy policy = [&](const AugmentedState& s) { return ag.select_action(s, eps, agent_rng_); };
    const Trajectory traj = run_episode(*env_, policy, setup, derive_seed(seed_, "env", ep));
    check_finite_trajectory(traj);
    const auto transitions = traj.transitions();
    agent_->learn(transitions, replay_rng_);
    if (vae_) train_vae(traj);
    ++episodes_done_;

    MetricsRow row;
    row.run_id = cfg_.run_id;
    row.seed = seed_;
    row.episode = ep;
    row.stats = episode_stats(traj);
    row.epsilon = eps;
    if (cfg_.record_wall_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
  }

  std::vector<MetricsRow> train(std::size_t episodes, const std::function<void(const MetricsRow&)>& on_row = {}) {
    std::vector<MetricsRow> rows;
    for (std::size_t i = 0; i < episodes; ++i) {
      rows.push_back(train_episode());
      if (on_row) on_row(rows.back());
    }
    return rows;
  }

  /// Episodes under an epsilon-greedy snapshot of the agent. Does not touch
  /// the agent, the novelty counts or the training random streams.
  std::vector<Trajectory> rollouts(std::size_t n, std::uint64_t eval_seed, double epsilon) const {
    auto env = env_->clone();
    agent::RewardSpec reward = reward_;
    Rng rng = make_rng(eval_seed, "eval-agent");
    EpisodeSetup setup{imitation_, density_spec(), &reward};
    const agent::Agent& ag = *agent_;
    Policy policy = [&](const AugmentedState& s) { return ag.select_action(s, epsilon, rng); };
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(run_episode(*env, policy, setup, derive_seed(eval_seed, "eval-env", i)));
    return out;
  }

  Summary evaluate(std::size_t n, std::uint64_t eval_seed, double epsilon) const {
    std::vector<EpisodeStats> st;
    for (const auto& t : rollouts(n, eval_seed, epsilon)) st.push_back(episode_stats(t));
    return summarize(std::move(st));
  }

  void save(Archive& ar) const {
    ar.meta["run_id"] = cfg_.run_id;
    ar.meta["seed"] = std::to_string(seed_);
    ar.meta["episodes_done"] = std::to_string(episodes_done_);
    agent_->save(ar);
    std::vector<double> keys, counts;
    std::size_t key_len = 0;
    for (const auto& [k, n] : reward_.novelty.table()) {
      key_len = k.size();
      for (auto v : k) keys.push_back(static_cast<double>(v));
      counts.push_back(static_cast<double>(n));
    }
    ar.meta["novelty.key_length"] = std::to_string(key_len);
    ar.arrays["novelty.keys"] = std::move(keys);
    ar.arrays["novelty.counts"] = std::move(counts);
    if (vae_) {
      ar.arrays["vae.encoder"] = vae_->encoder().flat_parameters();
      ar.arrays["vae.decoder"] = vae_->decoder().flat_parameters();
    }
  }

  void load(const Archive& ar) {
    agent_->load(ar);
    episodes_done_ = std::stoull(ar.get("episodes_done"));
    reward_.novelty.clear();
    const std::size_t len = std::stoull(ar.get("novelty.key_length"));
    const auto& keys = ar.array("novelty.keys");
    const auto& counts = ar.array("novelty.counts");
    require(keys.size() == len * counts.size(), "checkpoint novelty arrays have inconsistent lengths");
    for (std::size_t r = 0; r < counts.size(); ++r) {
      agent::NoveltyCounter::Key k(len);
      for (std::size_t i = 0; i < len; ++i) k[i] = static_cast<std::int64_t>(keys[r * len + i]);
      reward_.novelty.set(k, static_cast<std::uint64_t>(counts[r]));
    }
    if (vae_) {
      vae_->encoder().load_flat_parameters(ar.array("vae.encoder"));
      vae_->decoder().load_flat_parameters(ar.array("vae.decoder"));
    }
  }

 private:
  void train_vae(const Trajectory& traj) {
    for (const auto& s : traj.observations) {
      if (pool_.size() < cfg_.vae.pool_capacity) {
        pool_.push_back(s);
      } else {
        pool_[pool_next_] = s;
      }
      pool_next_ = (pool_next_ + 1) % cfg_.vae.pool_capacity;
    }
    for (std::size_t k = 0; k < cfg_.vae.steps_per_episode; ++k) {
      std::vector<Observation> batch;
      batch.reserve(cfg_.vae.batch_size);
      for (std::size_t b = 0; b < cfg_.vae.batch_size; ++b) batch.push_back(pool_[uniform_index(vae_rng_, pool_.size())]);
      vae_losses_.push_back(vae_->train_step(batch, *vae_opt_, vae_rng_).total);
    }
  }

  ExperimentConfig cfg_;
  std::uint64_t seed_;
  std::unique_ptr<env::Environment> env_;
  agent::RewardSpec reward_;
  Rng agent_rng_;
  Rng replay_rng_;
  Rng vae_rng_;
  std::vector<Observation> imitation_;
  std::optional<agent::Agent> agent_;
  std::unique_ptr<nn::Vae> vae_;
  std::unique_ptr<nn::Adam> vae_opt_;
  std::vector<Observation> pool_;
  std::size_t pool_next_ = 0;
  std::vector<double> vae_losses_;
  std::size_t episodes_done_ = 0;
};

/// Policy that picks uniformly at random, for baselines.
inline Policy random_policy(std::size_t actions, Rng& rng) {
  return [actions, &rng](const AugmentedState&) { return uniform_index(rng, actions); };
}

inline Policy constant_policy(std::size_t action) {
  return [action](const AugmentedState&) { return action; };
}

/// Summary of `n` episodes of an arbitrary policy under the run's episode setup.
inline Summary evaluate_policy(env::Environment& env, const Policy& policy, const EpisodeSetup& setup, std::size_t n,
                               std::uint64_t eval_seed) {
  std::vector<EpisodeStats> st;
  for (std::size_t i = 0; i < n; ++i) {
    st.push_back(episode_stats(run_episode(env, policy, setup, derive_seed(eval_seed, "eval-env", i))));
  }
  return summarize(std::move(st));
}

}  // namespace smirl::training
