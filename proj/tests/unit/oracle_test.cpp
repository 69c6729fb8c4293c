#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "smirl/core/random.hpp"
#include "smirl/density/bernoulli.hpp"
#include "smirl/oracle/solver.hpp"

using namespace smirl;
using namespace smirl::oracle;

namespace {

// Exhaustive recursion over raw histories, scoring rewards with the density
// module instead of belief-node counts.
double brute_value(const MicroCmp& cmp, std::vector<Observation>& history, std::size_t state, double alpha) {
  if (history.size() - 1 == cmp.horizon) return 0.0;
  density::BernoulliModel model(cmp.states, alpha);
  model.fit_reset(history);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < cmp.actions; ++a) {
    double q = 0.0;
    for (std::size_t next = 0; next < cmp.states; ++next) {
      const double p = cmp.prob(state, a, next);
      if (p == 0.0) continue;
      const Observation o = cmp.one_hot(next);
      const double r = model.log_prob(o);
      history.push_back(o);
      q += p * (r + brute_value(cmp, history, next, alpha));
      history.pop_back();
    }
    best = std::max(best, q);
  }
  return best;
}

double brute_value(const MicroCmp& cmp, double alpha) {
  std::vector<Observation> history{cmp.one_hot(cmp.initial_state)};
  return brute_value(cmp, history, cmp.initial_state, alpha);
}

MicroCmp random_cmp(Rng& rng, std::size_t states, std::size_t actions, std::size_t horizon) {
  MicroCmp cmp = make_empty_cmp("random", states, actions, horizon);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      // Sparse rows keep the branching small.
      const std::size_t n1 = uniform_index(rng, states), n2 = uniform_index(rng, states);
      const double w = uniform01(rng);
      cmp.prob(s, a, n1) += w;
      cmp.prob(s, a, n2) += 1.0 - w;
    }
  }
  cmp.initial_state = uniform_index(rng, states);
  return cmp;
}

}  // namespace

TEST(Oracle, ChainFirstStepReward) {
  const auto cmp = chain_fixture();
  const auto root = root_node(cmp);
  // theta = (2/3, 1/3, 1/3) after one visit to state 0; next state is 1.
  EXPECT_NEAR(transition_reward(root, 1, 1.0), 2.0 * std::log(1.0 / 3.0) + std::log(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(transition_reward(root, 1, 1.0), -2.602689685, 1e-9);
}

TEST(Oracle, ChainValueMatchesBruteForce) {
  const auto cmp = chain_fixture();
  const auto sol = solve(cmp);
  EXPECT_NEAR(sol.value, brute_value(cmp, 1.0), 1e-12);
  EXPECT_NEAR(sol.value, policy_eval(cmp, constant_action(0, 1)).value, 1e-12);
}

TEST(Oracle, TwoStateStayPrefersStaying) {
  const auto cmp = two_state_stay_fixture();
  const auto sol = solve(cmp);
  // Staying: 2 log((t+2)/(t+3)) per step telescopes to 2 log(1/3).
  EXPECT_NEAR(sol.value, 2.0 * std::log(1.0 / 3.0), 1e-12);
  EXPECT_EQ(sol.policy.at(root_node(cmp)), 0u);
  EXPECT_LT(policy_eval(cmp, constant_action(1, 2)).value, sol.value);
  EXPECT_LT(policy_eval(cmp, uniform_policy(2)).value, sol.value);
}

TEST(Oracle, CorridorOptimumCrosses) {
  const auto cmp = corridor_fixture();
  const auto sol = solve(cmp);
  EXPECT_EQ(sol.policy.at(root_node(cmp)), 1u);
  EXPECT_NEAR(sol.value, -22.2886, 1e-4);
  const double stay = policy_eval(cmp, constant_action(0, 2)).value;
  EXPECT_NEAR(stay, -24.8756, 1e-4);
  // Crossing pays more surprise early.
  const auto cross = policy_eval(cmp, constant_action(1, 2));
  const auto noisy = policy_eval(cmp, constant_action(0, 2));
  EXPECT_NEAR(cross.value, sol.value, 1e-12);
  EXPECT_LT(cross.step_rewards[0] + cross.step_rewards[1], noisy.step_rewards[0] + noisy.step_rewards[1]);
}

TEST(Oracle, PolicyEvalOfOptimumEqualsValue) {
  for (const auto& name : fixture_names()) {
    const auto cmp = named_fixture(name);
    const auto sol = solve(cmp);
    EXPECT_NEAR(policy_eval(cmp, sol.policy).value, sol.value, 1e-12) << name;
  }
}

TEST(Oracle, OneStepDeviationCertificate) {
  for (const auto& name : fixture_names()) {
    const auto cmp = named_fixture(name);
    const auto sol = solve(cmp);
    for (const auto& [node, action] : sol.policy) {
      const double v = sol.values.at(node);
      for (std::size_t a = 0; a < cmp.actions; ++a) {
        double q = 0.0;
        for (std::size_t next = 0; next < cmp.states; ++next) {
          const double p = cmp.prob(node.state, a, next);
          if (p == 0.0) continue;
          const auto child = child_node(node, next);
          const double tail = child.t == cmp.horizon ? 0.0 : sol.values.at(child);
          q += p * (transition_reward(node, next, 1.0) + tail);
        }
        EXPECT_LE(q, v + 1e-12) << name;
        if (a == action) {
          EXPECT_NEAR(q, v, 1e-12);
        }
      }
    }
  }
}

TEST(Oracle, RandomInstancesMatchBruteForce) {
  Rng rng(12);
  for (int i = 0; i < 30; ++i) {
    const auto cmp = random_cmp(rng, 2 + uniform_index(rng, 3), 1 + uniform_index(rng, 2), 1 + uniform_index(rng, 4));
    const double alpha = i % 2 == 0 ? 1.0 : 0.5;
    const auto sol = solve(cmp, alpha);
    EXPECT_NEAR(sol.value, brute_value(cmp, alpha), 1e-10) << format_micro_cmp(cmp);
    EXPECT_NEAR(policy_eval(cmp, sol.policy, alpha).value, sol.value, 1e-12);
    EXPECT_LE(policy_eval(cmp, uniform_policy(cmp.actions), alpha).value, sol.value + 1e-12);
  }
}

TEST(Oracle, StepRewardsSumToValue) {
  const auto cmp = corridor_fixture();
  const auto ev = policy_eval(cmp, uniform_policy(2));
  ASSERT_EQ(ev.step_rewards.size(), cmp.horizon);
  double sum = 0.0;
  for (double r : ev.step_rewards) sum += r;
  EXPECT_NEAR(sum, ev.value, 1e-12);
}

TEST(Oracle, RejectsZeroAlpha) { EXPECT_THROW(solve(chain_fixture(), 0.0), ContractError); }

TEST(MicroCmpFormat, RoundTripsFixtures) {
  for (const auto& name : fixture_names()) {
    const auto cmp = named_fixture(name);
    std::istringstream in(format_micro_cmp(cmp));
    const auto back = parse_micro_cmp(in);
    EXPECT_EQ(back.name, cmp.name);
    EXPECT_EQ(back.states, cmp.states);
    EXPECT_EQ(back.actions, cmp.actions);
    EXPECT_EQ(back.horizon, cmp.horizon);
    EXPECT_EQ(back.initial_state, cmp.initial_state);
    EXPECT_EQ(back.transitions, cmp.transitions);
  }
}

TEST(MicroCmpFormat, ParsesCommentsAndBlankLines) {
  std::istringstream in(
      "# two cells\n"
      "\n"
      "states 2   # trailing comment\n"
      "actions 1\n"
      "horizon 3\n"
      "initial 1\n"
      "p 0 0 0.5 0.5\n"
      "p 1 0 0 1\n");
  const auto cmp = parse_micro_cmp(in);
  EXPECT_EQ(cmp.initial_state, 1u);
  EXPECT_EQ(cmp.prob(0, 0, 1), 0.5);
  EXPECT_EQ(cmp.name, "file");
}

namespace {

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_micro_cmp(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(MicroCmpFormat, ErrorsCarryLineNumbers) {
  const std::string head = "states 2\nactions 1\nhorizon 2\n";
  EXPECT_EQ(error_line(head + "p 0 0 0.5 0.5\np 0 0 1 0\n"), 5u);
  EXPECT_EQ(error_line(head + "bogus 3\n"), 4u);
  EXPECT_EQ(error_line("p 0 0 1 0\n"), 1u);
  EXPECT_EQ(error_line(head + "p 0 0 1\n"), 4u);
  EXPECT_EQ(error_line(head + "p 0 0 1 0 7\n"), 4u);
  EXPECT_EQ(error_line(head + "p 2 0 1 0\n"), 4u);
  EXPECT_EQ(error_line("states -1\n"), 1u);
  // Missing rows and bad probability sums are reported at the last line.
  EXPECT_EQ(error_line(head + "p 0 0 1 0\n"), 4u);
  EXPECT_EQ(error_line(head + "p 0 0 0.7 0.7\np 1 0 0 1\n"), 5u);
  EXPECT_EQ(error_line("states 9\nactions 1\nhorizon 2\np 0 0 1 0 0 0 0 0 0 0 0\n"), 4u);
}

TEST(MicroCmpFormat, MessageNamesLine) {
  std::istringstream in("states 2\nwhat\n");
  try {
    parse_micro_cmp(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
