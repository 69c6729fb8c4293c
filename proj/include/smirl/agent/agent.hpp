#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smirl/agent/dqn.hpp"
#include "smirl/agent/q_table.hpp"

namespace smirl::agent {

enum class AgentKind { tabular, dqn };

inline std::string to_string(AgentKind k) { return k == AgentKind::tabular ? "tabular" : "dqn"; }
inline AgentKind parse_agent_kind(const std::string& s) {
  if (s == "tabular") return AgentKind::tabular;
  if (s == "dqn") return AgentKind::dqn;
  throw ContractError("unknown agent kind '" + s + "'");
}

/// Either backend behind one value type.
class Agent {
 public:
  explicit Agent(TabularAgent a) : impl_(std::move(a)) {}
  explicit Agent(DqnAgent a) : impl_(std::move(a)) {}

  AgentKind kind() const { return std::holds_alternative<TabularAgent>(impl_) ? AgentKind::tabular : AgentKind::dqn; }
  TabularAgent* tabular() { return std::get_if<TabularAgent>(&impl_); }
  DqnAgent* dqn() { return std::get_if<DqnAgent>(&impl_); }
  const TabularAgent* tabular() const { return std::get_if<TabularAgent>(&impl_); }
  const DqnAgent* dqn() const { return std::get_if<DqnAgent>(&impl_); }

  std::size_t action_count() const {
    return std::visit([](const auto& a) { return a.action_count(); }, impl_);
  }

  std::vector<double> q_values(const AugmentedState& s) const {
    return std::visit([&](const auto& a) { return a.q_values(s); }, impl_);
  }

  std::size_t select_action(const AugmentedState& s, double epsilon, Rng& rng) const {
    return epsilon_greedy(q_values(s), epsilon, rng);
  }

  void learn(std::span<const Transition> episode, Rng& rng) {
    if (auto* t = tabular()) {
      t->learn(episode);
    } else {
      dqn()->learn(episode, rng);
    }
  }

  void save(Archive& ar) const {
    ar.meta["agent.kind"] = to_string(kind());
    if (const auto* t = tabular()) {
      t->table().save(ar, "agent.q.");
    } else {
      dqn()->save(ar, "agent.dqn.");
    }
  }

  void load(const Archive& ar) {
    require(ar.get("agent.kind") == to_string(kind()), "checkpoint agent kind does not match the config");
    if (auto* t = tabular()) {
      t->table().load(ar, "agent.q.");
    } else {
      dqn()->load(ar, "agent.dqn.");
    }
  }

 private:
  std::variant<TabularAgent, DqnAgent> impl_;
};

}  // namespace smirl::agent
