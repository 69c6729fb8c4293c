#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "smirl/agent/agent.hpp"
#include "smirl/agent/reward.hpp"
#include "smirl/density/model.hpp"
#include "smirl/env/haunted_house.hpp"
#include "smirl/env/micro_cmp_env.hpp"
#include "smirl/env/tetris.hpp"
#include "smirl/env/windy_platform.hpp"
#include "smirl/nn/vae.hpp"
#include "smirl/oracle/micro_cmp.hpp"

namespace smirl::training {

struct EnvConfig {
  std::string id = "tetris";  // tetris | haunted_house | haunted_house_mini | windy_platform | micro_cmp
  env::TetrisConfig tetris{};
  env::HauntedHouseConfig haunted_house{};  // also used by haunted_house_mini; see select_environment
  env::WindyPlatformConfig windy_platform{};
  std::string micro_fixture = "two-state-stay";
  std::string micro_file;  // overrides the fixture when set
};

inline std::vector<std::string> environment_ids() {
  return {"tetris", "haunted_house", "haunted_house_mini", "windy_platform", "micro_cmp"};
}

struct DensityConfig {
  density::DensityKind kind = density::DensityKind::bernoulli;
  double alpha = 1.0;
  double sigma_min = 0.01;
};

struct AgentConfig {
  agent::AgentKind kind = agent::AgentKind::dqn;
  agent::TabularConfig tabular{};
  agent::DqnConfig dqn{};
  agent::EpsilonSchedule epsilon{};
  double eval_epsilon = 0.0;
};

struct RewardConfig {
  agent::RewardMode mode = agent::RewardMode::smirl;
  double alpha = 1.0;
  double novelty_beta = 1.0;
  double novelty_bin = 0.1;
};

struct VaeBlock {
  bool enabled = false;
  std::size_t latent_dim = 8;
  double beta = 1.0;
  std::vector<std::size_t> hidden = {64};
  nn::Activation activation = nn::Activation::relu;
  nn::Reconstruction reconstruction = nn::Reconstruction::gaussian;
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t steps_per_episode = 20;
  std::size_t pool_capacity = 100000;
};

struct ImitationConfig {
  std::string path;         // plain-text states, one per line
  std::size_t repeat = 1;   // each loaded state is added this many times to D_0
  std::vector<Observation> states;  // resolved from `path`
};

struct ExperimentConfig {
  std::string run_id = "run";
  EnvConfig env{};
  DensityConfig density{};
  AgentConfig agent{};
  RewardConfig reward{};
  std::size_t episodes = 100;
  std::size_t eval_episodes = 0;  // greedy-snapshot episodes run after training
  std::size_t max_steps = 0;  // 0 keeps the environment default
  std::vector<std::uint64_t> seeds = {0};
  VaeBlock vae{};
  ImitationConfig imitation{};
  std::string output_dir = "out";
  bool record_wall_time = false;
};

/// Sets the id and, for the mini house, loads its preset as the starting point.
inline void select_environment(EnvConfig& cfg, const std::string& id) {
  cfg.id = id;
  if (id == "haunted_house_mini") cfg.haunted_house = env::haunted_house_mini();
}

inline oracle::MicroCmp resolve_micro_cmp(const EnvConfig& cfg) {
  return cfg.micro_file.empty() ? oracle::named_fixture(cfg.micro_fixture) : oracle::load_micro_cmp(cfg.micro_file);
}

inline std::unique_ptr<env::Environment> make_environment(const EnvConfig& cfg, std::size_t max_steps = 0) {
  if (cfg.id == "tetris") {
    auto c = cfg.tetris;
    if (max_steps > 0) c.max_steps = max_steps;
    return std::make_unique<env::TetrisEnv>(c);
  }
  if (cfg.id == "haunted_house" || cfg.id == "haunted_house_mini") {
    auto c = cfg.haunted_house;
    if (max_steps > 0) c.max_steps = max_steps;
    return std::make_unique<env::HauntedHouseEnv>(c);
  }
  if (cfg.id == "windy_platform") {
    auto c = cfg.windy_platform;
    if (max_steps > 0) c.max_steps = max_steps;
    return std::make_unique<env::WindyPlatformEnv>(c);
  }
  if (cfg.id == "micro_cmp") {
    auto cmp = resolve_micro_cmp(cfg);
    require(max_steps == 0 || max_steps == cmp.horizon, "micro_cmp: max_steps must match the instance horizon");
    return std::make_unique<env::MicroCmpEnv>(std::move(cmp));
  }
  throw ContractError("unknown environment id '" + cfg.id + "'");
}

inline agent::RewardSpec make_reward_spec(const RewardConfig& r) {
  agent::RewardSpec spec;
  spec.mode = r.mode;
  spec.alpha = r.alpha;
  spec.novelty_beta = r.novelty_beta;
  spec.novelty = agent::NoveltyCounter(r.novelty_bin);
  spec.validate();
  return spec;
}

}  // namespace smirl::training
