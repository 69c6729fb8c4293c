#pragma once

#include "smirl/core/random.hpp"
#include "smirl/env/environment.hpp"
#include "smirl/oracle/micro_cmp.hpp"

namespace smirl::env {

/// Simulator for an oracle MicroCmp: one-hot observations, horizon = cmp.horizon.
class MicroCmpEnv final : public Environment {
 public:
  explicit MicroCmpEnv(oracle::MicroCmp cmp) : cmp_(std::move(cmp)) { cmp_.validate(); }

  EnvSpec spec() const override { return {cmp_.states, ObsKind::binary, cmp_.actions, cmp_.horizon}; }
  std::string name() const override { return "micro_cmp"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<MicroCmpEnv>(*this); }

  const oracle::MicroCmp& cmp() const { return cmp_; }
  std::size_t state() const { return state_; }

 protected:
  Observation do_reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    state_ = cmp_.initial_state;
    return cmp_.one_hot(state_);
  }

  StepOutcome do_step(std::size_t action) override {
    const double u = uniform01(rng_);
    double acc = 0.0;
    std::size_t next = cmp_.states - 1;
    for (std::size_t s = 0; s < cmp_.states; ++s) {
      const double p = cmp_.prob(state_, action, s);
      if (p == 0.0) continue;
      acc += p;
      if (u < acc) {
        next = s;
        break;
      }
      next = s;
    }
    state_ = next;
    StepOutcome out;
    out.observation = cmp_.one_hot(state_);
    return out;
  }

 private:
  oracle::MicroCmp cmp_;
  std::size_t state_ = 0;
  Rng rng_{0};
};

}  // namespace smirl::env
