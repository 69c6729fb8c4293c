#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>

#include "smirl/core/types.hpp"

namespace smirl::env {

enum class ObsKind { binary, continuous };

struct EnvSpec {
  std::size_t obs_dim = 1;
  ObsKind obs_kind = ObsKind::continuous;
  std::size_t action_count = 1;
  std::size_t max_steps = 1;  // episode horizon T
};

struct Events {
  bool death = false;              // Tetris board overflow (board resets, episode continues)
  bool fall = false;               // WindyPlatform; stays set once the agent has fallen
  int rows_cleared = 0;
  bool reached_safe_room = false;  // HauntedHouse: agent stands in the safe room after the step
  bool capture = false;            // HauntedHouse: an enemy caught the agent this step
};

struct StepOutcome {
  Observation observation;
  double task_reward = 0.0;
  Events events;
  bool terminal = false;
};

/// Controlled Markov process behind a reset/step contract. Episodes have a
/// fixed horizon: exactly `max_steps` steps follow every reset, and stepping a
/// finished episode throws.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual EnvSpec spec() const = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  Observation reset(std::uint64_t seed) {
    t_ = 0;
    started_ = true;
    Observation obs = do_reset(seed);
    require_dim(obs.size(), spec().obs_dim, "Environment::reset");
    return obs;
  }

  StepOutcome step(std::size_t action) {
    const EnvSpec s = spec();
    if (!started_) throw ContractError(name() + ": step() before reset()");
    if (t_ >= s.max_steps) throw ContractError(name() + ": step() on a terminal episode");
    if (action >= s.action_count) {
      throw ContractError(name() + ": action " + std::to_string(action) + " out of range");
    }
    StepOutcome out = do_step(action);
    ++t_;
    out.terminal = (t_ == s.max_steps);
    return out;
  }

  std::size_t time() const { return t_; }

 protected:
  virtual Observation do_reset(std::uint64_t seed) = 0;
  virtual StepOutcome do_step(std::size_t action) = 0;

 private:
  std::size_t t_ = 0;
  bool started_ = false;
};

}  // namespace smirl::env
