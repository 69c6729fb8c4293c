#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "smirl/agent/augmented_state.hpp"
#include "smirl/core/archive.hpp"
#include "smirl/core/types.hpp"

namespace smirl::agent {

/// Uniform bins on [lo, hi]; values outside are clamped to the edge bins.
/// One bin collapses the feature group to a constant.
struct Bins {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 8;

  std::int32_t index(double x) const {
    if (count <= 1) return 0;
    const double u = (x - lo) / (hi - lo);
    const auto b = static_cast<std::int64_t>(std::floor(u * static_cast<double>(count)));
    return static_cast<std::int32_t>(std::clamp<std::int64_t>(b, 0, static_cast<std::int64_t>(count) - 1));
  }

  void validate(const char* what) const {
    require(count >= 1, std::string(what) + ": bins must be >= 1");
    require(hi > lo, std::string(what) + ": bin range needs hi > lo");
  }
};

struct Discretization {
  Bins observation{0.0, 1.0, 2};
  Bins theta{0.0, 1.0, 8};
  Bins time{0.0, 1.0, 8};

  void validate() const {
    observation.validate("observation");
    theta.validate("theta");
    time.validate("time");
  }
};

struct TabularConfig {
  Discretization discretization{};
  double gamma = 0.99;
  double learning_rate = 0.1;
  bool visit_count_lr = false;  // use max(learning_rate, 1 / N(s,a)) instead of a constant rate
};

/// Action values over discretized augmented states. Unseen keys read as zeros.
class QTable {
 public:
  using Key = std::vector<std::int32_t>;

  QTable(std::size_t actions, Discretization disc) : actions_(actions), disc_(disc) {
    require(actions >= 1, "QTable: need at least one action");
    disc_.validate();
  }

  std::size_t action_count() const { return actions_; }
  const Discretization& discretization() const { return disc_; }
  std::size_t size() const { return table_.size(); }

  Key key(const AugmentedState& s) const {
    Key k;
    k.reserve(s.size());
    for (double x : s.observation) k.push_back(disc_.observation.index(x));
    for (double x : s.theta) k.push_back(disc_.theta.index(x));
    k.push_back(disc_.time.index(s.time_frac));
    return k;
  }

  std::vector<double> values(const Key& k) const {
    auto it = table_.find(k);
    return it == table_.end() ? std::vector<double>(actions_, 0.0) : it->second.q;
  }
  std::vector<double> values(const AugmentedState& s) const { return values(key(s)); }

  double max_value(const Key& k) const {
    const auto q = values(k);
    return *std::max_element(q.begin(), q.end());
  }

  double& at(const Key& k, std::size_t a) {
    require(a < actions_, "QTable: action out of range");
    return entry(k).q[a];
  }

  std::uint64_t visits(const Key& k, std::size_t a) const {
    auto it = table_.find(k);
    return it == table_.end() ? 0 : it->second.visits.at(a);
  }
  std::uint64_t& visit_counter(const Key& k, std::size_t a) { return entry(k).visits.at(a); }

  void save(Archive& ar, const std::string& prefix) const {
    std::vector<double> keys, q, n;
    for (const auto& [k, e] : table_) {
      for (auto v : k) keys.push_back(v);
      q.insert(q.end(), e.q.begin(), e.q.end());
      for (auto v : e.visits) n.push_back(static_cast<double>(v));
    }
    ar.meta[prefix + "key_length"] = std::to_string(table_.empty() ? 0 : table_.begin()->first.size());
    ar.arrays[prefix + "keys"] = std::move(keys);
    ar.arrays[prefix + "values"] = std::move(q);
    ar.arrays[prefix + "visits"] = std::move(n);
  }

  void load(const Archive& ar, const std::string& prefix) {
    const std::size_t len = std::stoul(ar.get(prefix + "key_length"));
    const auto& keys = ar.array(prefix + "keys");
    const auto& q = ar.array(prefix + "values");
    const auto& n = ar.array(prefix + "visits");
    const std::size_t rows = len == 0 ? 0 : keys.size() / len;
    require(rows * len == keys.size() && q.size() == rows * actions_ && n.size() == rows * actions_,
            "QTable checkpoint arrays have inconsistent lengths");
    table_.clear();
    for (std::size_t r = 0; r < rows; ++r) {
      Key k(len);
      for (std::size_t i = 0; i < len; ++i) k[i] = static_cast<std::int32_t>(keys[r * len + i]);
      Entry& e = entry(k);
      for (std::size_t a = 0; a < actions_; ++a) {
        e.q[a] = q[r * actions_ + a];
        e.visits[a] = static_cast<std::uint64_t>(n[r * actions_ + a]);
      }
    }
  }

 private:
  struct Entry {
    std::vector<double> q;
    std::vector<std::uint64_t> visits;
  };

  Entry& entry(const Key& k) {
    auto [it, inserted] = table_.try_emplace(k);
    if (inserted) {
      it->second.q.assign(actions_, 0.0);
      it->second.visits.assign(actions_, 0);
    }
    return it->second;
  }

  std::size_t actions_;
  Discretization disc_;
  std::map<Key, Entry> table_;
};

/// Q(s,a) <- Q(s,a) + lr (r + gamma max_a' Q(s',a') (1 - terminal) - Q(s,a)).
inline void q_update_tabular(QTable& table, const Transition& tr, double gamma, double lr) {
  require(gamma >= 0.0 && gamma <= 1.0, "q_update_tabular: gamma must be in [0, 1]");
  require(lr >= 0.0 && lr <= 1.0, "q_update_tabular: lr must be in [0, 1]");
  const auto next = table.key(tr.next);
  const double bootstrap = tr.terminal ? 0.0 : table.max_value(next);
  double& q = table.at(table.key(tr.state), tr.action);
  q += lr * (tr.reward + gamma * bootstrap - q);
}

class TabularAgent {
 public:
  TabularAgent(std::size_t actions, TabularConfig cfg) : cfg_(cfg), table_(actions, cfg.discretization) {
    require(cfg_.learning_rate >= 0.0 && cfg_.learning_rate <= 1.0, "tabular learning_rate must be in [0, 1]");
  }

  const TabularConfig& config() const { return cfg_; }
  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  std::size_t action_count() const { return table_.action_count(); }

  std::vector<double> q_values(const AugmentedState& s) const { return table_.values(s); }

  std::size_t select_action(const AugmentedState& s, double epsilon, Rng& rng) const {
    return epsilon_greedy(q_values(s), epsilon, rng);
  }

  /// One backward sweep over an episode's transitions.
  void learn(std::span<const Transition> episode) {
    for (std::size_t i = episode.size(); i-- > 0;) {
      const Transition& tr = episode[i];
      double lr = cfg_.learning_rate;
      if (cfg_.visit_count_lr) {
        auto& n = table_.visit_counter(table_.key(tr.state), tr.action);
        ++n;
        lr = std::max(lr, 1.0 / static_cast<double>(n));
      }
      q_update_tabular(table_, tr, cfg_.gamma, lr);
    }
  }

 private:
  TabularConfig cfg_;
  QTable table_;
};

}  // namespace smirl::agent
