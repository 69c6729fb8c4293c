#pragma once

#include <cstdint>
#include <vector>

#include "smirl/agent/augmented_state.hpp"
#include "smirl/core/random.hpp"
#include "smirl/core/types.hpp"
#include "smirl/nn/graph.hpp"

namespace smirl::agent {

/// Transition with both augmented states flattened to feature vectors.
struct FlatTransition {
  std::vector<double> state;
  std::size_t action = 0;
  double reward = 0.0;
  std::vector<double> next;
  bool terminal = false;
};

struct Batch {
  nn::Matrix states;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  nn::Matrix next_states;
  std::vector<bool> terminal;

  std::size_t size() const { return actions.size(); }
};

inline Batch make_batch(const std::vector<const FlatTransition*>& items) {
  require(!items.empty(), "make_batch: empty batch");
  const auto rows = static_cast<Eigen::Index>(items.size());
  const auto cols = static_cast<Eigen::Index>(items.front()->state.size());
  Batch b;
  b.states.resize(rows, cols);
  b.next_states.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const FlatTransition& t = *items[static_cast<std::size_t>(r)];
    require_dim(t.state.size(), static_cast<std::size_t>(cols), "make_batch state");
    require_dim(t.next.size(), static_cast<std::size_t>(cols), "make_batch next state");
    std::copy(t.state.begin(), t.state.end(), b.states.row(r).data());
    std::copy(t.next.begin(), t.next.end(), b.next_states.row(r).data());
    b.actions.push_back(t.action);
    b.rewards.push_back(t.reward);
    b.terminal.push_back(t.terminal);
  }
  return b;
}

/// Fixed-capacity ring; once full, each push overwrites the oldest entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    require(capacity >= 1, "ReplayBuffer: capacity must be >= 1");
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const FlatTransition& operator[](std::size_t i) const { return items_.at(i); }

  void push(FlatTransition t) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(t));
    } else {
      items_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
  }

  /// Uniform indices with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const {
    require(!items_.empty(), "ReplayBuffer: sampling an empty buffer");
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = uniform_index(rng, items_.size());
    return idx;
  }

  Batch sample(std::size_t n, Rng& rng) const {
    std::vector<const FlatTransition*> picked;
    for (std::size_t i : sample_indices(n, rng)) picked.push_back(&items_[i]);
    return make_batch(picked);
  }

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<FlatTransition> items_;
};

}  // namespace smirl::agent
