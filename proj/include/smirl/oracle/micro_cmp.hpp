#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl::oracle {

inline constexpr std::size_t kMaxStates = 8;
inline constexpr std::size_t kMaxActions = 4;
inline constexpr std::size_t kMaxHorizon = 8;

/// Tiny controlled Markov process whose observation is the one-hot of the
/// state, so the Bernoulli density model applies directly.
struct MicroCmp {
  std::string name;
  std::size_t states = 0;
  std::size_t actions = 0;
  std::size_t horizon = 0;
  std::size_t initial_state = 0;
  std::vector<double> transitions;  // [s][a][s'], row-major

  double prob(std::size_t s, std::size_t a, std::size_t next) const {
    return transitions[(s * actions + a) * states + next];
  }
  double& prob(std::size_t s, std::size_t a, std::size_t next) {
    return transitions[(s * actions + a) * states + next];
  }

  /// Throws ContractError when the instance is malformed or exceeds the
  /// enumeration bounds.
  void validate() const {
    require(states >= 1 && states <= kMaxStates,
            "MicroCmp: state count must be in [1, " + std::to_string(kMaxStates) + "]");
    require(actions >= 1 && actions <= kMaxActions,
            "MicroCmp: action count must be in [1, " + std::to_string(kMaxActions) + "]");
    require(horizon >= 1 && horizon <= kMaxHorizon,
            "MicroCmp: horizon must be in [1, " + std::to_string(kMaxHorizon) + "]");
    require(initial_state < states, "MicroCmp: initial state out of range");
    require_dim(transitions.size(), states * actions * states, "MicroCmp transitions");
    for (std::size_t s = 0; s < states; ++s) {
      for (std::size_t a = 0; a < actions; ++a) {
        double total = 0.0;
        for (std::size_t n = 0; n < states; ++n) {
          const double p = prob(s, a, n);
          require(std::isfinite(p) && p >= 0.0, "MicroCmp: negative or non-finite probability");
          total += p;
        }
        require(std::abs(total - 1.0) <= 1e-12, "MicroCmp: P(.|" + std::to_string(s) + "," +
                                                    std::to_string(a) + ") does not sum to 1");
      }
    }
  }

  Observation one_hot(std::size_t s) const {
    Observation o(states, 0.0);
    o[s] = 1.0;
    return o;
  }
};

inline MicroCmp make_empty_cmp(std::string name, std::size_t states, std::size_t actions, std::size_t horizon) {
  MicroCmp cmp;
  cmp.name = std::move(name);
  cmp.states = states;
  cmp.actions = actions;
  cmp.horizon = horizon;
  cmp.transitions.assign(states * actions * states, 0.0);
  return cmp;
}

/// Two states; action 0 keeps the state, action 1 jumps to a uniformly random state.
inline MicroCmp two_state_stay_fixture() {
  MicroCmp cmp = make_empty_cmp("two-state-stay", 2, 2, 4);
  for (std::size_t s = 0; s < 2; ++s) {
    cmp.prob(s, 0, s) = 1.0;
    cmp.prob(s, 1, 0) = 0.5;
    cmp.prob(s, 1, 1) = 0.5;
  }
  return cmp;
}

/// Noisy four-cell start room {0..3}, a two-step corridor {4, 5} and a quiet
/// absorbing room 6. Action 0 stays in (or falls back to) the noisy room,
/// action 1 advances one cell. Crossing costs early surprise but is optimal.
inline MicroCmp corridor_fixture() {
  MicroCmp cmp = make_empty_cmp("corridor", 7, 2, 8);
  for (std::size_t s = 0; s < 6; ++s) {
    for (std::size_t k = 0; k < 4; ++k) cmp.prob(s, 0, k) = 0.25;
  }
  for (std::size_t s = 0; s < 4; ++s) cmp.prob(s, 1, 4) = 1.0;
  cmp.prob(4, 1, 5) = 1.0;
  cmp.prob(5, 1, 6) = 1.0;
  cmp.prob(6, 0, 6) = 1.0;
  cmp.prob(6, 1, 6) = 1.0;
  return cmp;
}

/// Deterministic single-action chain 0 -> 1 -> ... -> states-1 (absorbing).
inline MicroCmp chain_fixture(std::size_t states = 3, std::size_t horizon = 4) {
  MicroCmp cmp = make_empty_cmp("chain", states, 1, horizon);
  for (std::size_t s = 0; s < states; ++s) cmp.prob(s, 0, std::min(s + 1, states - 1)) = 1.0;
  return cmp;
}

inline std::vector<std::string> fixture_names() { return {"two-state-stay", "corridor", "chain"}; }

inline MicroCmp named_fixture(const std::string& name) {
  if (name == "two-state-stay") return two_state_stay_fixture();
  if (name == "corridor") return corridor_fixture();
  if (name == "chain") return chain_fixture();
  throw ContractError("unknown MicroCmp fixture '" + name + "'");
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Plain-text tensor format:
///
///     # comment
///     name corridor          (optional)
///     states 5
///     actions 2
///     horizon 8
///     initial 0
///     p <s> <a> <P(0|s,a)> ... <P(S-1|s,a)>
///
/// Header keys must precede the `p` rows; every (s, a) row must appear exactly once.
inline MicroCmp parse_micro_cmp(std::istream& in) {
  MicroCmp cmp;
  cmp.name = "file";
  std::vector<bool> seen;
  bool has_states = false, has_actions = false, has_horizon = false;
  std::string raw;
  std::size_t lineno = 0;
  auto read_count = [&](std::istringstream& ls, const std::string& key) {
    long long v = -1;
    if (!(ls >> v) || v < 0) throw ParseError(lineno, "expected a non-negative integer after '" + key + "'");
    return static_cast<std::size_t>(v);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "name") {
      ls >> cmp.name;
    } else if (key == "states") {
      cmp.states = read_count(ls, key);
      has_states = true;
    } else if (key == "actions") {
      cmp.actions = read_count(ls, key);
      has_actions = true;
    } else if (key == "horizon") {
      cmp.horizon = read_count(ls, key);
      has_horizon = true;
    } else if (key == "initial") {
      cmp.initial_state = read_count(ls, key);
    } else if (key == "p") {
      if (!has_states || !has_actions) throw ParseError(lineno, "'p' row before 'states'/'actions'");
      if (cmp.states == 0 || cmp.states > kMaxStates || cmp.actions == 0 || cmp.actions > kMaxActions) {
        throw ParseError(lineno, "instance exceeds enumeration bounds");
      }
      if (cmp.transitions.empty()) {
        cmp.transitions.assign(cmp.states * cmp.actions * cmp.states, 0.0);
        seen.assign(cmp.states * cmp.actions, false);
      }
      const std::size_t s = read_count(ls, key);
      const std::size_t a = read_count(ls, key);
      if (s >= cmp.states || a >= cmp.actions) throw ParseError(lineno, "state/action index out of range");
      if (seen[s * cmp.actions + a]) throw ParseError(lineno, "duplicate row for this (s, a)");
      seen[s * cmp.actions + a] = true;
      for (std::size_t n = 0; n < cmp.states; ++n) {
        double p = 0.0;
        if (!(ls >> p)) throw ParseError(lineno, "expected " + std::to_string(cmp.states) + " probabilities");
        cmp.prob(s, a, n) = p;
      }
      std::string extra;
      if (ls >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");
    } else {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
  }
  if (!has_states || !has_actions || !has_horizon) throw ParseError(lineno, "missing states/actions/horizon");
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw ParseError(lineno, "missing row for s=" + std::to_string(i / cmp.actions) +
                                   " a=" + std::to_string(i % cmp.actions));
    }
  }
  if (seen.empty()) throw ParseError(lineno, "no transition rows");
  try {
    cmp.validate();
  } catch (const ContractError& e) {
    throw ParseError(lineno, e.what());
  }
  return cmp;
}

inline MicroCmp load_micro_cmp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MicroCmp file '" + path + "'");
  return parse_micro_cmp(in);
}

inline std::string format_micro_cmp(const MicroCmp& cmp) {
  std::ostringstream out;
  out.precision(17);
  out << "name " << cmp.name << "\nstates " << cmp.states << "\nactions " << cmp.actions << "\nhorizon "
      << cmp.horizon << "\ninitial " << cmp.initial_state << "\n";
  for (std::size_t s = 0; s < cmp.states; ++s) {
    for (std::size_t a = 0; a < cmp.actions; ++a) {
      out << "p " << s << ' ' << a;
      for (std::size_t n = 0; n < cmp.states; ++n) out << ' ' << cmp.prob(s, a, n);
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace smirl::oracle
