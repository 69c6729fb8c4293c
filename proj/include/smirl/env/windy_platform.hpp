#pragma once

#include <cmath>
#include <random>

#include "smirl/core/random.hpp"
#include "smirl/env/environment.hpp"

namespace smirl::env {

/// Point mass on a platform [0, length]. belt_velocity 0 gives the cliff-like
/// variant, -1 the treadmill-like one; kick_prob > 0 adds pedestal-style random
/// impulses.
struct WindyPlatformConfig {
  double length = 10.0;
  double belt_velocity = 0.0;   // m/s, moves the surface under the agent
  double wind_mean = 0.0;
  double wind_std = 0.3;        // zero-mean Gaussian force per step by default
  double kick_prob = 0.0;
  double kick_std = 1.0;        // velocity impulse std when a kick fires
  double thrust = 1.0;          // f in the action set {-f, 0, +f}
  double damping = 1.0;         // friction pulling the belt-relative velocity to 0
  double dt = 0.05;
  double fall_noise = 1.0;      // random-walk std once off the platform
  double target_velocity = 1.0; // v* of the walking task reward
  std::size_t max_steps = 100;
};

/// Observation (position, velocity), velocity measured relative to the belt.
/// Actions: 0 thrust -f, 1 no thrust, 2 thrust +f. Explicit Euler:
///   x' = x + dt (v + v_belt)
///   v' = v + dt (u + wind - damping v)   (+ kick impulse)
/// Leaving [0, length] is a fall; afterwards both coordinates random-walk for
/// the rest of the episode. Task reward exp(-1.5 (v' - v*)^2).
class WindyPlatformEnv final : public Environment {
 public:
  static constexpr std::size_t kHold = 1;

  explicit WindyPlatformEnv(WindyPlatformConfig cfg = {}) : cfg_(cfg) {
    require(cfg_.length > 0.0, "WindyPlatform: length must be > 0");
    require(cfg_.dt > 0.0, "WindyPlatform: dt must be > 0");
    require(cfg_.wind_std >= 0.0 && cfg_.kick_std >= 0.0 && cfg_.fall_noise >= 0.0,
            "WindyPlatform: noise scales must be >= 0");
    require(cfg_.kick_prob >= 0.0 && cfg_.kick_prob <= 1.0, "WindyPlatform: kick_prob must be in [0,1]");
    require(cfg_.max_steps >= 1, "WindyPlatform: max_steps must be >= 1");
  }

  EnvSpec spec() const override { return {2, ObsKind::continuous, 3, cfg_.max_steps}; }
  std::string name() const override { return "windy_platform"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<WindyPlatformEnv>(*this); }

  const WindyPlatformConfig& config() const { return cfg_; }
  double position() const { return x_; }
  double velocity() const { return v_; }
  bool fallen() const { return fallen_; }

  /// Test hook: place the agent.
  void set_state(double position, double velocity) {
    x_ = position;
    v_ = velocity;
  }

  static double walk_reward(double velocity, double target) {
    const double vd = velocity - target;
    return std::exp(-1.5 * vd * vd);
  }

 protected:
  Observation do_reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    x_ = 0.5 * cfg_.length;
    v_ = 0.0;
    fallen_ = false;
    return {x_, v_};
  }

  StepOutcome do_step(std::size_t action) override {
    StepOutcome out;
    std::normal_distribution<double> unit(0.0, 1.0);
    if (fallen_) {
      x_ += cfg_.fall_noise * unit(rng_);
      v_ = cfg_.fall_noise * unit(rng_);
    } else {
      const double u = cfg_.thrust * (static_cast<double>(action) - 1.0);
      const double wind = cfg_.wind_mean + cfg_.wind_std * unit(rng_);
      const double x_next = x_ + cfg_.dt * (v_ + cfg_.belt_velocity);
      double v_next = v_ + cfg_.dt * (u + wind - cfg_.damping * v_);
      if (cfg_.kick_prob > 0.0 && uniform01(rng_) < cfg_.kick_prob) v_next += cfg_.kick_std * unit(rng_);
      x_ = x_next;
      v_ = v_next;
      fallen_ = x_ < 0.0 || x_ > cfg_.length;
    }
    out.events.fall = fallen_;
    out.task_reward = walk_reward(v_, cfg_.target_velocity);
    out.observation = {x_, v_};
    return out;
  }

 private:
  WindyPlatformConfig cfg_;
  double x_ = 0.0;
  double v_ = 0.0;
  bool fallen_ = false;
  Rng rng_{0};
};

}  // namespace smirl::env
