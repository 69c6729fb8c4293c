#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl::agent {

enum class RewardMode { smirl, task, combined, task_plus_novelty, smirl_plus_novelty, novelty };

inline std::string to_string(RewardMode m) {
  switch (m) {
    case RewardMode::smirl: return "smirl";
    case RewardMode::task: return "task";
    case RewardMode::combined: return "combined";
    case RewardMode::task_plus_novelty: return "task_plus_novelty";
    case RewardMode::smirl_plus_novelty: return "smirl_plus_novelty";
    case RewardMode::novelty: return "novelty";
  }
  return "?";
}

inline RewardMode parse_reward_mode(const std::string& s) {
  for (RewardMode m : {RewardMode::smirl, RewardMode::task, RewardMode::combined, RewardMode::task_plus_novelty,
                       RewardMode::smirl_plus_novelty, RewardMode::novelty}) {
    if (to_string(m) == s) return m;
  }
  throw ContractError("unknown reward mode '" + s + "'");
}

inline bool uses_novelty(RewardMode m) {
  return m == RewardMode::task_plus_novelty || m == RewardMode::smirl_plus_novelty || m == RewardMode::novelty;
}

/// Visit counts over observations discretized to a grid of `bin_width`.
/// Persists across episodes.
class NoveltyCounter {
 public:
  using Key = std::vector<std::int64_t>;

  explicit NoveltyCounter(double bin_width = 0.1) : bin_width_(bin_width) {
    require(bin_width > 0.0 && std::isfinite(bin_width), "NoveltyCounter: bin_width must be > 0");
  }

  double bin_width() const { return bin_width_; }

  Key key(std::span<const double> obs) const {
    Key k(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) k[i] = static_cast<std::int64_t>(std::floor(obs[i] / bin_width_));
    return k;
  }

  /// Increments N(s) and returns the new count.
  std::uint64_t visit(std::span<const double> obs) { return ++counts_[key(obs)]; }

  std::uint64_t count(std::span<const double> obs) const {
    auto it = counts_.find(key(obs));
    return it == counts_.end() ? 0 : it->second;
  }

  const std::map<Key, std::uint64_t>& table() const { return counts_; }
  void set(const Key& k, std::uint64_t n) { counts_[k] = n; }
  void clear() { counts_.clear(); }

 private:
  double bin_width_;
  std::map<Key, std::uint64_t> counts_;
};

struct RewardSpec {
  RewardMode mode = RewardMode::smirl;
  double alpha = 1.0;         // weight of the smirl term in combined mode
  double novelty_beta = 0.0;  // bonus scale beta / sqrt(N(s))
  NoveltyCounter novelty{};

  void validate() const {
    require(alpha >= 0.0 && std::isfinite(alpha), "reward alpha must be finite and >= 0");
    require(novelty_beta >= 0.0 && std::isfinite(novelty_beta), "novelty_beta must be finite and >= 0");
  }
};

/// Per-mode reward:
///   smirl               r_smirl
///   task                r_task
///   combined            r_task + alpha r_smirl
///   task_plus_novelty   r_task + beta / sqrt(N(s))
///   smirl_plus_novelty  r_smirl + beta / sqrt(N(s))
///   novelty             beta / sqrt(N(s))
/// Novelty modes count the visit to `obs` before computing the bonus, so N >= 1.
inline double compose_reward(RewardSpec& spec, double r_task, double r_smirl, std::span<const double> obs) {
  double bonus = 0.0;
  if (uses_novelty(spec.mode)) {
    const auto n = static_cast<double>(spec.novelty.visit(obs));
    bonus = spec.novelty_beta / std::sqrt(n);
  }
  switch (spec.mode) {
    case RewardMode::smirl: return r_smirl;
    case RewardMode::task: return r_task;
    case RewardMode::combined: return r_task + spec.alpha * r_smirl;
    case RewardMode::task_plus_novelty: return r_task + bonus;
    case RewardMode::smirl_plus_novelty: return r_smirl + bonus;
    case RewardMode::novelty: return bonus;
  }
  return 0.0;
}

}  // namespace smirl::agent
