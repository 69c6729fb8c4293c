#pragma once

#include <span>
#include <string>
#include <vector>

#include "smirl/agent/augmented_state.hpp"
#include "smirl/agent/replay_buffer.hpp"
#include "smirl/core/archive.hpp"
#include "smirl/nn/adam.hpp"
#include "smirl/nn/network.hpp"

namespace smirl::agent {

struct DqnConfig {
  std::vector<std::size_t> hidden = {64, 64};
  nn::Activation activation = nn::Activation::relu;
  double gamma = 0.99;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 50000;
  std::size_t target_sync_every = 500;  // gradient updates between target copies
  std::size_t updates_per_episode = 25;
  std::size_t learning_starts = 1000;   // transitions stored before the first update
  double reward_scale = 1.0;
  bool double_q = false;
  nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 10.0};
};

/// Bootstrap targets r + gamma (1 - terminal) max_a' Q_target(s', a'). With
/// `online` given, the argmax comes from it instead (double Q-learning).
inline std::vector<double> bellman_targets(const nn::Network& target, const Batch& batch, double gamma,
                                           const nn::Network* online = nullptr) {
  const nn::Matrix qt = target.forward_batch(batch.next_states);
  nn::Matrix qo;
  if (online != nullptr) qo = online->forward_batch(batch.next_states);
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    double next = 0.0;
    if (!batch.terminal[i]) {
      if (online != nullptr) {
        Eigen::Index best = 0;
        qo.row(r).maxCoeff(&best);
        next = qt(r, best);
      } else {
        next = qt.row(r).maxCoeff();
      }
    }
    y[i] = batch.rewards[i] + gamma * next;
  }
  return y;
}

/// Mean squared Bellman error of `net` on the batch against `targets`, with the
/// graph left ready for gradient extraction.
struct BellmanLoss {
  nn::Network::Bound bound;
  nn::Var loss;
};

inline BellmanLoss bellman_loss(nn::Graph& g, const nn::Network& net, const Batch& batch,
                                const std::vector<double>& targets) {
  BellmanLoss out;
  out.bound = net.bind(g);
  const nn::Var q = net.forward(g, out.bound, g.input(batch.states));
  const nn::Var picked = g.pick(q, batch.actions);
  nn::Matrix y(static_cast<Eigen::Index>(targets.size()), 1);
  for (std::size_t i = 0; i < targets.size(); ++i) y(static_cast<Eigen::Index>(i), 0) = targets[i];
  out.loss = g.mean(g.square(g.sub(picked, g.input(std::move(y)))));
  return out;
}

/// One optimizer step on the mean squared Bellman error; returns the pre-step loss.
inline double dqn_update(nn::Network& net, const nn::Network& target_net, const Batch& batch, double gamma,
                         nn::Adam& opt, bool double_q = false) {
  require(batch.size() > 0, "dqn_update: empty batch");
  const auto y = bellman_targets(target_net, batch, gamma, double_q ? &net : nullptr);
  nn::Graph g;
  const BellmanLoss bl = bellman_loss(g, net, batch, y);
  const double loss = g.scalar(bl.loss);
  if (!std::isfinite(loss)) throw nn::NonFiniteError("dqn_update: non-finite loss");
  g.backward(bl.loss);
  const auto grads = nn::Network::gradients(g, bl.bound);
  const auto params = net.parameters();
  opt.step(params, grads);
  return loss;
}

/// target <- net, bit-exact.
inline void sync_target(const nn::Network& net, nn::Network& target_net) { target_net = net; }

class DqnAgent {
 public:
  DqnAgent(std::size_t input_dim, std::size_t actions, DqnConfig cfg, Rng& init_rng)
      : cfg_(std::move(cfg)), opt_(cfg_.adam), buffer_(cfg_.buffer_capacity) {
    require(actions >= 1 && input_dim >= 1, "DqnAgent: dimensions must be >= 1");
    require(cfg_.gamma >= 0.0 && cfg_.gamma <= 1.0, "DqnAgent: gamma must be in [0, 1]");
    require(cfg_.batch_size >= 1 && cfg_.target_sync_every >= 1, "DqnAgent: batch size and sync period must be >= 1");
    std::vector<std::size_t> sizes{input_dim};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(actions);
    net_ = nn::Network(sizes, cfg_.activation, nn::Activation::linear, init_rng);
    target_ = net_;
  }

  const DqnConfig& config() const { return cfg_; }
  const nn::Network& network() const { return net_; }
  const nn::Network& target_network() const { return target_; }
  nn::Network& network() { return net_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::size_t update_count() const { return updates_; }
  std::size_t action_count() const { return net_.output_dim(); }
  double last_loss() const { return last_loss_; }

  std::vector<double> q_values(const AugmentedState& s) const { return net_.forward(s.features()); }

  std::size_t select_action(const AugmentedState& s, double epsilon, Rng& rng) const {
    return epsilon_greedy(q_values(s), epsilon, rng);
  }

  /// Stores the episode, then runs the configured number of minibatch updates.
  void learn(std::span<const Transition> episode, Rng& rng) {
    for (const Transition& tr : episode) {
      buffer_.push({tr.state.features(), tr.action, tr.reward * cfg_.reward_scale, tr.next.features(), tr.terminal});
    }
    if (buffer_.size() < std::max<std::size_t>(cfg_.learning_starts, 1)) return;
    for (std::size_t u = 0; u < cfg_.updates_per_episode; ++u) {
      const Batch batch = buffer_.sample(cfg_.batch_size, rng);
      last_loss_ = dqn_update(net_, target_, batch, cfg_.gamma, opt_, cfg_.double_q);
      ++updates_;
      if (updates_ % cfg_.target_sync_every == 0) sync_target(net_, target_);
    }
  }

  void save(Archive& ar, const std::string& prefix) const {
    ar.meta[prefix + "updates"] = std::to_string(updates_);
    ar.meta[prefix + "adam_steps"] = std::to_string(opt_.step_count());
    ar.arrays[prefix + "online"] = net_.flat_parameters();
    ar.arrays[prefix + "target"] = target_.flat_parameters();
    ar.arrays[prefix + "adam_m"] = flatten(opt_.first_moments());
    ar.arrays[prefix + "adam_v"] = flatten(opt_.second_moments());
  }

  void load(const Archive& ar, const std::string& prefix) {
    net_.load_flat_parameters(ar.array(prefix + "online"));
    target_.load_flat_parameters(ar.array(prefix + "target"));
    updates_ = std::stoull(ar.get(prefix + "updates"));
    const std::size_t steps = std::stoull(ar.get(prefix + "adam_steps"));
    const auto& m = ar.array(prefix + "adam_m");
    const auto& v = ar.array(prefix + "adam_v");
    if (m.empty() && v.empty()) {
      opt_.restore(steps, {}, {});
      return;
    }
    opt_.restore(steps, unflatten(m), unflatten(v));
  }

 private:
  static std::vector<double> flatten(const std::vector<nn::Matrix>& ms) {
    std::vector<double> out;
    for (const auto& m : ms) out.insert(out.end(), m.data(), m.data() + m.size());
    return out;
  }

  std::vector<nn::Matrix> unflatten(const std::vector<double>& flat) const {
    require_dim(flat.size(), net_.parameter_count(), "DqnAgent optimizer moments");
    std::vector<nn::Matrix> out;
    std::size_t off = 0;
    for (const auto* p : net_.parameters()) {
      nn::Matrix m(p->rows(), p->cols());
      std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
                flat.begin() + static_cast<std::ptrdiff_t>(off + static_cast<std::size_t>(m.size())), m.data());
      off += static_cast<std::size_t>(m.size());
      out.push_back(std::move(m));
    }
    return out;
  }

  DqnConfig cfg_;
  nn::Network net_;
  nn::Network target_;
  nn::Adam opt_;
  ReplayBuffer buffer_;
  std::size_t updates_ = 0;
  double last_loss_ = 0.0;
};

}  // namespace smirl::agent
