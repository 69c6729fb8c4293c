#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "smirl/agent/dqn.hpp"
#include "smirl/cli/metrics.hpp"
#include "smirl/oracle/solver.hpp"
#include "smirl/training/audit.hpp"
#include "smirl/training/trainer.hpp"

namespace smirl::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 9;

namespace detail {

inline std::string fmt(double x, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << x;
  return ss.str();
}

inline double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample mean and half-width of a normal-approximation 95% interval.
struct Interval {
  double mean = 0.0;
  double half = 0.0;
  double lo() const { return mean - half; }
  double hi() const { return mean + half; }
};

inline Interval interval95(const std::vector<double>& xs) {
  Interval ci;
  ci.mean = mean(xs);
  if (xs.size() < 2) return ci;
  double ss = 0.0;
  for (double x : xs) ss += (x - ci.mean) * (x - ci.mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  ci.half = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
  return ci;
}

inline std::vector<Observation> random_states(Rng& rng, std::size_t n, std::size_t dim, bool binary) {
  std::vector<Observation> out(n, Observation(dim));
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (auto& s : out) {
    for (auto& x : s) x = binary ? static_cast<double>(uniform_index(rng, 2)) : gauss(rng);
  }
  return out;
}

// Independent reference formulas, written from the definitions with plain loops.

inline double bernoulli_reference(const std::vector<Observation>& data, const Observation& s, double alpha) {
  const double n = static_cast<double>(data.size());
  double lp = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double ones = 0.0;
    for (const auto& d : data) ones += d[i];
    const double theta = (ones + alpha) / (n + 2.0 * alpha);
    lp += s[i] * std::log(theta) + (1.0 - s[i]) * std::log(1.0 - theta);
  }
  return lp;
}

inline std::vector<double> bernoulli_theta_reference(const std::vector<Observation>& data, double alpha) {
  std::vector<double> theta(data.front().size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double ones = 0.0;
    for (const auto& d : data) ones += d[i];
    theta[i] = (ones + alpha) / (static_cast<double>(data.size()) + 2.0 * alpha);
  }
  return theta;
}

/// Two-pass population mean and std, std floored at sigma_min.
inline std::vector<double> gaussian_stats_reference(const std::vector<Observation>& data, double sigma_min) {
  const std::size_t dim = data.front().size();
  const double n = static_cast<double>(data.size());
  std::vector<double> theta(2 * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double mu = 0.0;
    for (const auto& d : data) mu += d[i];
    mu /= n;
    double var = 0.0;
    for (const auto& d : data) var += (mu - d[i]) * (mu - d[i]);
    var /= n;
    theta[2 * i] = mu;
    theta[2 * i + 1] = std::max(sigma_min, std::sqrt(var));
  }
  return theta;
}

inline double gaussian_reference(const std::vector<Observation>& data, const Observation& s, double sigma_min) {
  const auto theta = gaussian_stats_reference(data, sigma_min);
  double lp = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mu = theta[2 * i];
    const double sg = theta[2 * i + 1];
    lp += -std::log(sg) - (s[i] - mu) * (s[i] - mu) / (2.0 * sg * sg);
  }
  return lp;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiment settings shared by the acceptance runs and the example configs.

/// Tabular SMiRL on a MicroCmp fixture, tuned to reach the oracle optimum.
inline training::ExperimentConfig micro_tabular_config(const std::string& fixture, std::size_t episodes) {
  training::ExperimentConfig cfg;
  cfg.run_id = "micro-" + fixture;
  training::select_environment(cfg.env, "micro_cmp");
  cfg.env.micro_fixture = fixture;
  cfg.agent.kind = agent::AgentKind::tabular;
  cfg.agent.tabular.gamma = 1.0;
  cfg.agent.tabular.learning_rate = 0.1;
  cfg.agent.tabular.visit_count_lr = true;
  cfg.agent.tabular.discretization.theta = {0.0, 1.0, 64};
  cfg.agent.tabular.discretization.time = {0.0, 1.0, 64};
  cfg.agent.epsilon = {1.0, 0.05, 0.5};
  cfg.episodes = episodes;
  return cfg;
}

inline training::ExperimentConfig mini_house_config() {
  training::ExperimentConfig cfg;
  cfg.run_id = "mini-house";
  training::select_environment(cfg.env, "haunted_house_mini");
  cfg.agent.kind = agent::AgentKind::dqn;
  cfg.agent.dqn.gamma = 1.0;
  cfg.agent.dqn.reward_scale = 0.1;
  cfg.episodes = 3000;
  return cfg;
}

inline training::ExperimentConfig tetris_config(agent::RewardMode mode) {
  training::ExperimentConfig cfg;
  cfg.run_id = "tetris-" + agent::to_string(mode);
  training::select_environment(cfg.env, "tetris");
  cfg.agent.kind = agent::AgentKind::dqn;
  cfg.agent.dqn.hidden = {128, 128};
  cfg.agent.dqn.gamma = 0.95;
  cfg.agent.dqn.updates_per_episode = 50;
  cfg.agent.dqn.reward_scale = 0.1;
  cfg.reward.mode = mode;
  cfg.reward.novelty_bin = 0.5;
  cfg.episodes = 3000;
  return cfg;
}

/// Target Tetris boards: bottom row "###." with either pending shape.
inline std::vector<Observation> imitation_targets() {
  const env::TetrisConfig board{};
  const std::size_t cells = static_cast<std::size_t>(board.width * board.height);
  std::vector<Observation> out;
  for (std::size_t shape = 0; shape < env::kTrominoCount; ++shape) {
    Observation o(cells + env::kTrominoCount, 0.0);
    o[0] = o[1] = o[2] = 1.0;
    o[cells + shape] = 1.0;
    out.push_back(o);
  }
  return out;
}

inline training::ExperimentConfig imitation_config() {
  training::ExperimentConfig cfg = tetris_config(agent::RewardMode::smirl);
  cfg.run_id = "tetris-imitation";
  cfg.imitation.states = imitation_targets();
  cfg.imitation.repeat = 10;
  cfg.episodes = 1000;
  return cfg;
}

/// WindyPlatform walking task on a short platform: holding v* = 1 walks off the edge.
inline training::ExperimentConfig windy_walk_config(agent::RewardMode mode) {
  training::ExperimentConfig cfg;
  cfg.run_id = "windy-walk-" + agent::to_string(mode);
  training::select_environment(cfg.env, "windy_platform");
  cfg.env.windy_platform.length = 6.0;
  cfg.density.kind = density::DensityKind::gaussian;
  cfg.agent.kind = agent::AgentKind::dqn;
  cfg.agent.dqn.gamma = 0.95;
  cfg.reward.mode = mode;
  cfg.reward.alpha = 0.1;
  cfg.episodes = 300;
  return cfg;
}

// ---------------------------------------------------------------------------
// Criteria. Each returns a pass flag and a one-line detail string.

/// Density closed forms and incremental-vs-batch equality.
inline CriterionResult density_closed_forms() {
  CriterionResult res{1, "density closed forms", false, {}, 0.0};
  Rng rng(101);
  double worst_case = 0.0;
  // 20 fixed cases: 10 Bernoulli, 10 Gaussian, small dimensions and histories.
  for (int c = 0; c < 20; ++c) {
    const bool binary = c < 10;
    const std::size_t dim = 1 + static_cast<std::size_t>(c % 5);
    const std::size_t n = 1 + static_cast<std::size_t>((3 * c) % 7);
    const auto data = detail::random_states(rng, n, dim, binary);
    const auto probe = detail::random_states(rng, 1, dim, binary).front();
    double got = 0.0;
    double want = 0.0;
    if (binary) {
      const double alpha = (c % 2 == 0) ? 1.0 : 0.5;
      density::BernoulliModel m(dim, alpha);
      m.fit_reset(data);
      got = m.log_prob(probe);
      want = detail::bernoulli_reference(data, probe, alpha);
    } else {
      density::GaussianModel m(dim, 0.01);
      m.fit_reset(data);
      got = m.log_prob(probe);
      want = detail::gaussian_reference(data, probe, 0.01);
    }
    worst_case = std::max(worst_case, std::abs(got - want));
  }

  double worst_seq = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const bool binary = k % 2 == 0;
    const std::size_t dim = 1 + uniform_index(rng, 8);
    const std::size_t n = 1 + uniform_index(rng, 60);
    const auto data = detail::random_states(rng, n, dim, binary);
    const auto probe = detail::random_states(rng, 1, dim, binary).front();
    density::DensitySpec spec;
    spec.kind = binary ? density::DensityKind::bernoulli : density::DensityKind::gaussian;
    density::DensityModel inc = density::make_model(spec, dim);
    density::fit_reset(inc, std::span(data.data(), 1));
    for (std::size_t i = 1; i < n; ++i) density::update(inc, data[i]);
    density::DensityModel batch = density::make_model(spec, dim);
    density::fit_reset(batch, data);
    worst_seq = std::max(worst_seq, training::max_abs_diff(density::theta_features(inc), density::theta_features(batch)));
    worst_seq = std::max(worst_seq, std::abs(density::log_prob(inc, probe) - density::log_prob(batch, probe)));
    const std::vector<double> reference = binary ? detail::bernoulli_theta_reference(data, spec.alpha)
                                                 : detail::gaussian_stats_reference(data, spec.sigma_min);
    worst_seq = std::max(worst_seq, training::max_abs_diff(density::theta_features(inc), reference));
  }
  res.pass = worst_case <= 1e-9 && worst_seq <= 1e-9;
  res.detail = "20 closed-form cases max err " + detail::fmt(worst_case, 3) + ", 1000 sequences max err " +
               detail::fmt(worst_seq, 3) + " (tol 1e-9)";
  return res;
}

/// Reverse-mode gradients against central finite differences.
inline CriterionResult autodiff_probes() {
  CriterionResult res{2, "autodiff vs finite differences", false, {}, 0.0};
  Rng rng(202);
  constexpr double h = 1e-6;
  double worst = 0.0;
  std::normal_distribution<double> unit(0.0, 1.0);
  auto random_matrix = [&](Eigen::Index r, Eigen::Index c) {
    nn::Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = unit(rng);
    return m;
  };

  for (int probe = 0; probe < 50; ++probe) {
    const int kind = probe % 4;  // 0 regression, 1 Bellman, 2 Gaussian VAE, 3 Bernoulli VAE
    const auto in = static_cast<std::size_t>(1 + uniform_index(rng, 6));
    const auto batch = static_cast<Eigen::Index>(1 + uniform_index(rng, 5));
    std::vector<std::size_t> hidden;
    for (std::size_t l = 0, n = 1 + uniform_index(rng, 2); l < n; ++l) hidden.push_back(2 + uniform_index(rng, 6));
    const nn::Activation act = uniform_index(rng, 2) == 0 ? nn::Activation::tanh : nn::Activation::relu;

    std::function<double()> loss;
    std::function<std::vector<nn::Matrix>()> analytic;
    std::vector<nn::Matrix*> params;

    std::unique_ptr<nn::Network> net;
    std::unique_ptr<nn::Vae> vae;
    nn::Matrix x, y;
    agent::Batch qb;
    std::vector<double> targets;
    if (kind <= 1) {
      const auto out = static_cast<std::size_t>(1 + uniform_index(rng, 4));
      std::vector<std::size_t> sizes{in};
      sizes.insert(sizes.end(), hidden.begin(), hidden.end());
      sizes.push_back(out);
      net = std::make_unique<nn::Network>(sizes, act, nn::Activation::linear, rng);
      params = net->parameters();
      x = random_matrix(batch, static_cast<Eigen::Index>(in));
      if (kind == 0) {
        y = random_matrix(batch, static_cast<Eigen::Index>(out));
        auto build = [&](nn::Graph& g, nn::Network::Bound& bound) {
          bound = net->bind(g);
          const nn::Var o = net->forward(g, bound, g.input(x));
          return g.mean(g.square(g.sub(o, g.input(y))));
        };
        loss = [&, build] {
          nn::Graph g;
          nn::Network::Bound b;
          return g.scalar(build(g, b));
        };
        analytic = [&, build] {
          nn::Graph g;
          nn::Network::Bound b;
          const nn::Var l = build(g, b);
          g.backward(l);
          return nn::Network::gradients(g, b);
        };
      } else {
        qb.states = x;
        for (Eigen::Index r = 0; r < batch; ++r) {
          qb.actions.push_back(uniform_index(rng, out));
          targets.push_back(unit(rng));
        }
        loss = [&] {
          nn::Graph g;
          return g.scalar(agent::bellman_loss(g, *net, qb, targets).loss);
        };
        analytic = [&] {
          nn::Graph g;
          const auto bl = agent::bellman_loss(g, *net, qb, targets);
          g.backward(bl.loss);
          return nn::Network::gradients(g, bl.bound);
        };
      }
    } else {
      nn::VaeConfig vc;
      vc.obs_dim = in;
      vc.latent_dim = 1 + uniform_index(rng, 3);
      vc.hidden = hidden;
      vc.activation = act;
      vc.beta = 0.5 + uniform01(rng);
      vc.reconstruction = kind == 2 ? nn::Reconstruction::gaussian : nn::Reconstruction::bernoulli;
      vae = std::make_unique<nn::Vae>(vc, rng);
      params = vae->parameters();
      std::vector<Observation> data(static_cast<std::size_t>(batch), Observation(in));
      for (auto& s : data) {
        for (auto& v : s) v = kind == 2 ? unit(rng) : static_cast<double>(uniform_index(rng, 2));
      }
      const std::uint64_t noise_seed = rng();
      loss = [&, data, noise_seed] {
        Rng r(noise_seed);
        return vae->loss(data, r).total;
      };
      analytic = [&, data, noise_seed] {
        Rng r(noise_seed);
        return vae->gradients(data, r);
      };
    }

    // Random biases too: zero-initialized biases on an all-zero binary input put
    // relu pre-activations exactly on the kink, where central differences are meaningless.
    for (nn::Matrix* m : params) {
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] += 0.1 * unit(rng);
    }
    const std::vector<nn::Matrix> g = analytic();
    double diff2 = 0.0, a2 = 0.0, f2 = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      nn::Matrix& m = *params[p];
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double orig = m.data()[i];
        m.data()[i] = orig + h;
        const double up = loss();
        m.data()[i] = orig - h;
        const double down = loss();
        m.data()[i] = orig;
        const double fd = (up - down) / (2.0 * h);
        const double an = g[p].data()[i];
        diff2 += (an - fd) * (an - fd);
        a2 += an * an;
        f2 += fd * fd;
      }
    }
    const double denom = std::sqrt(a2) + std::sqrt(f2);
    const double rel = denom > 0.0 ? std::sqrt(diff2) / denom : 0.0;
    worst = std::max(worst, rel);
  }
  res.pass = worst < 1e-4;
  res.detail = "50 probes (regression, Bellman, Gaussian/Bernoulli VAE), max relative error " + detail::fmt(worst, 3) +
               " (tol 1e-4)";
  return res;
}

/// Greedy action of a trained agent at an oracle belief node. D_t is rebuilt
/// from the node's state counts, so the agent sees the same augmented state it
/// would see in an episode that reached the node.
inline oracle::StochasticPolicy greedy_node_policy(const agent::Agent& ag, const oracle::MicroCmp& cmp,
                                                   double alpha = 1.0) {
  return [&ag, &cmp, alpha](const oracle::BeliefNode& node) {
    std::vector<Observation> d;
    for (std::size_t s = 0; s < cmp.states; ++s) {
      for (int k = 0; k < node.counts[s]; ++k) d.push_back(cmp.one_hot(s));
    }
    density::BernoulliModel m(cmp.states, alpha);
    m.fit_reset(d);
    const agent::AugmentedState aug{cmp.one_hot(node.state), m.theta_features(),
                                    static_cast<double>(node.t) / static_cast<double>(cmp.horizon)};
    std::vector<double> pa(cmp.actions, 0.0);
    pa[agent::greedy_action(ag.q_values(aug))] = 1.0;
    return pa;
  };
}

/// |MC mean - exact| <= 3 standard errors, plus 1e-9 for rounding when the
/// return is deterministic. `used` receives the error as a fraction of that bound.
inline bool mc_agrees(const training::Stat& mc, std::size_t n, double exact, double* used = nullptr) {
  const double bound = 3.0 * mc.std / std::sqrt(static_cast<double>(n)) + 1e-9;
  const double err = std::abs(mc.mean - exact);
  if (used != nullptr) *used = err / bound;
  return err <= bound;
}

inline std::size_t micro_episodes(const std::string& fixture) { return fixture == "corridor" ? 20000 : 2000; }

/// Tabular training reaches the oracle optimum; Monte Carlo agrees with exact evaluation.
inline CriterionResult oracle_optimality() {
  CriterionResult res{3, "oracle optimality", false, {}, 0.0};
  res.pass = true;
  std::ostringstream detail_text;
  constexpr std::size_t kRollouts = 100000;
  for (const std::string fixture : {"two-state-stay", "corridor"}) {
    const oracle::MicroCmp cmp = oracle::named_fixture(fixture);
    const oracle::Solution sol = oracle::solve(cmp);
    const double bar = sol.value - 0.01 * std::abs(sol.value);
    double worst_ratio = INFINITY;
    double worst_mc = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      training::SeedRun run(micro_tabular_config(fixture, micro_episodes(fixture)), seed);
      run.train(run.config().episodes);
      const double greedy = oracle::policy_eval(cmp, greedy_node_policy(run.agent(), cmp)).value;
      worst_ratio = std::min(worst_ratio, greedy / sol.value);
      if (greedy < bar) res.pass = false;
      if (seed == 0) {
        double z = 0.0;
        const auto mc = run.evaluate(kRollouts, derive_seed(seed, "mc"), 0.0);
        if (!mc_agrees(mc.smirl_return, kRollouts, greedy, &z)) res.pass = false;
        worst_mc = std::max(worst_mc, std::abs(z));
      }
    }
    env::MicroCmpEnv env(cmp);
    training::EpisodeSetup setup;
    for (int which = 0; which < 2; ++which) {
      Rng rng = make_rng(7, "mc-policy");
      const training::Policy p = which == 0 ? training::constant_policy(0) : training::random_policy(cmp.actions, rng);
      const double exact = oracle::policy_eval(cmp, which == 0 ? oracle::constant_action(0, cmp.actions)
                                                               : oracle::uniform_policy(cmp.actions))
                               .value;
      const auto mc = training::evaluate_policy(env, p, setup, kRollouts, derive_seed(11, fixture));
      double z = 0.0;
      if (!mc_agrees(mc.smirl_return, kRollouts, exact, &z)) res.pass = false;
      worst_mc = std::max(worst_mc, std::abs(z));
    }
    // Ratio of two negative returns: <= 1.01 means within 1% of V*.
    detail_text << fixture << " V*=" << detail::fmt(sol.value) << " worst greedy/V*=" << detail::fmt(worst_ratio)
                << " MC error/bound=" << detail::fmt(worst_mc, 3) << "; ";
  }
  res.detail = detail_text.str() + "need greedy >= V*-0.01|V*| on 3 seeds, MC within 3 SE over 1e5 rollouts";
  return res;
}

inline double first_quartile_mean(const std::vector<double>& step_rewards) {
  const std::size_t q = std::max<std::size_t>(1, step_rewards.size() / 4);
  return std::accumulate(step_rewards.begin(), step_rewards.begin() + static_cast<std::ptrdiff_t>(q), 0.0) /
         static_cast<double>(q);
}

/// Early surprise for later calm: corridor oracle and trained mini-house agent.
inline CriterionResult delayed_gratification() {
  CriterionResult res{4, "delayed gratification", false, {}, 0.0};
  std::ostringstream text;

  const oracle::MicroCmp cmp = oracle::corridor_fixture();
  const oracle::Solution sol = oracle::solve(cmp);
  const auto opt = oracle::policy_eval(cmp, sol.policy);
  const auto stay = oracle::policy_eval(cmp, oracle::constant_action(0, cmp.actions));
  const double opt_q1 = first_quartile_mean(opt.step_rewards);
  const double stay_q1 = first_quartile_mean(stay.step_rewards);
  const bool corridor_ok = opt_q1 < stay_q1 && opt.value > stay.value;
  text << "corridor q1 " << detail::fmt(opt_q1, 4) << " vs stay " << detail::fmt(stay_q1, 4) << ", total "
       << detail::fmt(opt.value, 4) << " vs " << detail::fmt(stay.value, 4) << "; ";

  constexpr std::size_t kEval = 100;
  std::vector<double> q1_trained, q1_stay, total_trained, total_stay;
  std::size_t reached = 0;
  std::size_t episodes = 0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    training::SeedRun run(mini_house_config(), seed);
    run.train(run.config().episodes);
    const std::uint64_t eval_seed = derive_seed(seed, "eval");
    for (const auto& t : run.rollouts(kEval, eval_seed, 0.0)) {
      q1_trained.push_back(first_quartile_mean(t.r_smirl));
      total_trained.push_back(training::smirl_return(t));
      ++episodes;
      if (std::any_of(t.events.begin(), t.events.end(), [](const env::Events& e) { return e.reached_safe_room; })) {
        ++reached;
      }
    }
    auto env = training::make_environment(run.config().env);
    training::EpisodeSetup setup;
    for (std::size_t i = 0; i < kEval; ++i) {
      const auto t = training::run_episode(*env, training::constant_policy(env::HauntedHouseEnv::kStay), setup,
                                           derive_seed(eval_seed, "eval-env", i));
      q1_stay.push_back(first_quartile_mean(t.r_smirl));
      total_stay.push_back(training::smirl_return(t));
    }
  }
  const double reach = static_cast<double>(reached) / static_cast<double>(episodes);
  const double tq1 = detail::mean(q1_trained), sq1 = detail::mean(q1_stay);
  const double ttot = detail::mean(total_trained), stot = detail::mean(total_stay);
  const bool house_ok = reach >= 0.8 && tq1 < sq1 && ttot > stot;
  text << "mini-house reach " << detail::fmt(reach, 3) << " (need >= 0.8), q1 " << detail::fmt(tq1, 4) << " vs stay "
       << detail::fmt(sq1, 4) << ", total " << detail::fmt(ttot, 5) << " vs " << detail::fmt(stot, 5);
  res.pass = corridor_ok && house_ok;
  res.detail = text.str();
  return res;
}

/// SMiRL keeps the Tetris board alive; novelty seeking does not.
inline CriterionResult tetris_behavior() {
  CriterionResult res{5, "tetris deaths", false, {}, 0.0};
  constexpr std::size_t kSeeds = 5;
  constexpr std::size_t kEval = 100;
  std::vector<double> random_deaths, smirl_deaths, smirl_rows, novelty_deaths;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const std::uint64_t eval_seed = derive_seed(seed, "eval");
    {
      auto env = training::make_environment(tetris_config(agent::RewardMode::smirl).env);
      Rng rng = make_rng(seed, "random-policy");
      training::EpisodeSetup setup;
      const auto s = training::evaluate_policy(*env, training::random_policy(env->spec().action_count, rng), setup,
                                               kEval, eval_seed);
      random_deaths.push_back(s.deaths.mean);
    }
    for (const auto mode : {agent::RewardMode::smirl, agent::RewardMode::novelty}) {
      training::SeedRun run(tetris_config(mode), seed);
      run.train(run.config().episodes);
      const auto s = run.evaluate(kEval, eval_seed, 0.0);
      if (mode == agent::RewardMode::smirl) {
        smirl_deaths.push_back(s.deaths.mean);
        smirl_rows.push_back(s.rows_cleared.mean);
      } else {
        novelty_deaths.push_back(s.deaths.mean);
      }
    }
  }
  const double rd = detail::mean(random_deaths), sd = detail::mean(smirl_deaths);
  const double sr = detail::mean(smirl_rows), nd = detail::mean(novelty_deaths);
  res.pass = sd <= 0.5 * rd && sr > 0.0 && nd >= rd;
  res.detail = "deaths/episode random " + detail::fmt(rd, 4) + ", smirl " + detail::fmt(sd, 4) + " (need <= " +
               detail::fmt(0.5 * rd, 4) + "), novelty " + detail::fmt(nd, 4) + " (need >= random); smirl rows " +
               detail::fmt(sr, 4) + " (need > 0)";
  return res;
}

/// Latent pipeline: VAE training, brute-force latent statistics, identity encoder.
inline CriterionResult latent_mode() {
  CriterionResult res{8, "vae / latent density", false, {}, 0.0};
  std::ostringstream text;

  // ELBO on the cross-episode pool, first vs last 200 training steps.
  std::size_t decreased = 0;
  constexpr std::size_t kRuns = 20;
  for (std::uint64_t seed = 0; seed < kRuns; ++seed) {
    training::ExperimentConfig cfg;
    training::select_environment(cfg.env, "tetris");
    cfg.density.kind = density::DensityKind::latent;
    cfg.vae.enabled = true;
    cfg.vae.latent_dim = 4;
    cfg.vae.hidden = {32};
    cfg.vae.reconstruction = nn::Reconstruction::bernoulli;
    cfg.vae.steps_per_episode = 20;
    cfg.agent.kind = agent::AgentKind::dqn;
    cfg.agent.dqn.learning_starts = 1000000;  // act from the initial network; only the VAE learns
    cfg.episodes = 30;
    training::SeedRun run(cfg, seed);
    run.train(cfg.episodes);
    const auto& losses = run.vae_losses();
    const std::vector<double> first(losses.begin(), losses.begin() + 200);
    const std::vector<double> last(losses.end() - 200, losses.end());
    if (detail::mean(last) < detail::mean(first)) ++decreased;
  }
  const double frac = static_cast<double>(decreased) / static_cast<double>(kRuns);
  text << "ELBO loss decreased in " << decreased << "/" << kRuns << " runs (need >= 95%); ";

  // Latent statistics against an explicit recomputation over the encoded history.
  Rng rng(808);
  double stats_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t obs = 1 + uniform_index(rng, 6);
    const std::size_t lat = 1 + uniform_index(rng, 4);
    auto net = std::make_shared<nn::Network>(std::vector<std::size_t>{obs, 8, lat}, nn::Activation::tanh,
                                             nn::Activation::linear, rng);
    const density::Encoder enc = [net](std::span<const double> s) { return net->forward(s); };
    const auto data = detail::random_states(rng, 40, obs, false);
    density::LatentGaussianModel m(enc, obs, lat, 0.01);
    m.fit_reset(std::span(data.data(), 1));
    std::vector<Observation> zs{net->forward(data[0])};
    for (std::size_t t = 1; t < data.size(); ++t) {
      m.update(data[t]);
      zs.push_back(net->forward(data[t]));
      stats_err = std::max(stats_err, training::max_abs_diff(m.theta_features(), detail::gaussian_stats_reference(zs, 0.01)));
      const auto probe = detail::random_states(rng, 1, obs, false).front();
      stats_err = std::max(stats_err, std::abs(m.log_prob(probe) - detail::gaussian_reference(zs, net->forward(probe), 0.01)));
    }
  }
  text << "latent stats max err " << detail::fmt(stats_err, 3) << "; ";

  // Identity encoder reproduces the plain Gaussian pipeline.
  double ident_err = 0.0;
  {
    training::EnvConfig ec;
    training::select_environment(ec, "windy_platform");
    auto env = training::make_environment(ec);
    const std::size_t dim = env->spec().obs_dim;
    training::EpisodeSetup gauss;
    gauss.density.kind = density::DensityKind::gaussian;
    training::EpisodeSetup latent;
    latent.density.kind = density::DensityKind::latent;
    latent.density.latent_dim = dim;
    latent.density.encoder = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    for (std::uint64_t i = 0; i < 20; ++i) {
      Rng r1 = make_rng(i, "policy"), r2 = make_rng(i, "policy");
      const auto a = training::run_episode(*env, training::random_policy(env->spec().action_count, r1), gauss, i);
      const auto b = training::run_episode(*env, training::random_policy(env->spec().action_count, r2), latent, i);
      ident_err = std::max(ident_err, training::max_abs_diff(a.r_smirl, b.r_smirl));
      for (std::size_t t = 0; t < a.thetas.size(); ++t) ident_err = std::max(ident_err, training::max_abs_diff(a.thetas[t], b.thetas[t]));
    }
  }
  text << "identity encoder vs gaussian max err " << detail::fmt(ident_err, 3) << " (tol 1e-9)";
  res.pass = frac >= 0.95 && stats_err <= 1e-9 && ident_err <= 1e-9;
  res.detail = text.str();
  return res;
}

/// Reward, belief and isolation audits over random trajectories in every environment.
inline CriterionResult markov_audits() {
  CriterionResult res{9, "markov audits", false, {}, 0.0};
  double reward_err = 0.0, replay_err = 0.0, successor_err = 0.0, isolation_err = 0.0, rerun_err = 0.0;
  std::size_t successor_checks = 0;
  std::size_t trajectories = 0;
  Rng rng(909);
  for (const std::string id : {"tetris", "haunted_house", "haunted_house_mini", "windy_platform", "micro_cmp"}) {
    training::EnvConfig ec;
    training::select_environment(ec, id);
    ec.micro_fixture = "corridor";
    if (id == "haunted_house") ec.haunted_house.enemy_noise = 0.2;
    auto env = training::make_environment(ec);
    const env::EnvSpec spec = env->spec();
    for (std::uint64_t k = 0; k < 20; ++k) {
      training::EpisodeSetup setup;
      if (spec.obs_kind == env::ObsKind::binary) {
        setup.density.kind = density::DensityKind::bernoulli;
        setup.density.alpha = k % 3 == 0 ? 0.5 : 1.0;
      } else if (k % 2 == 0) {
        setup.density.kind = density::DensityKind::gaussian;
      } else {
        setup.density.kind = density::DensityKind::latent;
        setup.density.latent_dim = 3;
        auto net = std::make_shared<nn::Network>(std::vector<std::size_t>{spec.obs_dim, 8, 3}, nn::Activation::tanh,
                                                 nn::Activation::linear, rng);
        setup.density.encoder = [net](std::span<const double> s) { return net->forward(s); };
      }
      if (k % 4 == 1) {
        // Imitation states: start observations of unrelated episodes.
        auto other = env->clone();
        for (std::uint64_t j = 0; j < 3; ++j) setup.imitation_states.push_back(other->reset(derive_seed(k, "imitation", j)));
      }
      Rng policy_rng = make_rng(k, id);
      const auto policy = training::random_policy(spec.action_count, policy_rng);
      const std::uint64_t seed = derive_seed(k, "audit", trajectories);
      const auto traj = training::run_episode(*env, policy, setup, seed);
      ++trajectories;
      reward_err = std::max(reward_err, training::reward_audit(traj, setup.density, setup.imitation_states));
      const auto th = training::theta_audit(traj, setup.density, setup.imitation_states);
      replay_err = std::max(replay_err, th.max_replay_error);
      successor_err = std::max(successor_err, th.max_successor_error);
      successor_checks += th.successor_checks;
      isolation_err = std::max(isolation_err, training::isolation_audit(traj, setup.density, setup.imitation_states));

      // The same seed and actions on a fresh environment give the same episode.
      auto fresh = training::make_environment(ec);
      std::size_t step = 0;
      const training::Policy replay = [&](const agent::AugmentedState&) { return traj.actions[step++]; };
      const auto again = training::run_episode(*fresh, replay, setup, seed);
      rerun_err = std::max(rerun_err, training::max_abs_diff(traj.r_smirl, again.r_smirl));
      rerun_err = std::max(rerun_err, training::max_abs_diff(traj.thetas.front(), again.thetas.front()));
    }
  }
  const double worst = std::max({reward_err, replay_err, successor_err, isolation_err, rerun_err});
  res.pass = trajectories == 100 && successor_checks > 0 && worst <= 1e-9;
  res.detail = std::to_string(trajectories) + " trajectories: reward " + detail::fmt(reward_err, 3) + ", theta replay " +
               detail::fmt(replay_err, 3) + ", theta successor " + detail::fmt(successor_err, 3) + " (" +
               std::to_string(successor_checks) + " checks), isolation " + detail::fmt(isolation_err, 3) +
               ", fresh-env rerun " + detail::fmt(rerun_err, 3) + " (tol 1e-9)";
  return res;
}

/// log p_{theta_0}(s_T): how close the final state is to the imitation-seeded D_0.
inline double terminal_log_prob(const training::Trajectory& traj, const std::vector<Observation>& imitation) {
  density::BernoulliModel m(traj.observations.front().size(), 1.0);
  m.fit_reset(training::initial_history({imitation, {}, nullptr}, traj.observations.front()));
  return m.log_prob(traj.observations.back());
}

/// An imitation-seeded D_0 steers the trained agent toward the target board.
inline CriterionResult imitation() {
  CriterionResult res{6, "imitation", false, {}, 0.0};
  constexpr std::size_t kEval = 100;
  std::vector<double> trained, random;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const training::ExperimentConfig cfg = imitation_config();
    const std::uint64_t eval_seed = derive_seed(seed, "eval");
    training::SeedRun run(cfg, seed);
    run.train(cfg.episodes);
    const auto& im = run.imitation_states();
    std::vector<double> per;
    for (const auto& t : run.rollouts(kEval, eval_seed, 0.0)) per.push_back(terminal_log_prob(t, im));
    trained.push_back(detail::mean(per));

    per.clear();
    auto env = training::make_environment(cfg.env);
    Rng rng = make_rng(seed, "random-policy");
    const auto policy = training::random_policy(env->spec().action_count, rng);
    training::EpisodeSetup setup{im, run.density_spec(), nullptr};
    for (std::size_t i = 0; i < kEval; ++i) {
      per.push_back(terminal_log_prob(training::run_episode(*env, policy, setup, derive_seed(eval_seed, "eval-env", i)), im));
    }
    random.push_back(detail::mean(per));
  }
  const auto t = detail::interval95(trained);
  const auto r = detail::interval95(random);
  res.pass = t.mean > r.mean && t.lo() > r.hi();
  res.detail = "terminal log p under theta_0: trained " + detail::fmt(t.mean, 5) + " [" + detail::fmt(t.lo(), 5) + ", " +
               detail::fmt(t.hi(), 5) + "], random " + detail::fmt(r.mean, 5) + " [" + detail::fmt(r.lo(), 5) + ", " +
               detail::fmt(r.hi(), 5) + "] (need disjoint, trained above; 3 seeds x " + std::to_string(kEval) + " episodes)";
  return res;
}

/// Adding the surprise term to the walking reward reduces falls during training.
inline CriterionResult joint_training() {
  CriterionResult res{7, "joint training", false, {}, 0.0};
  std::vector<double> task_falls, combined_falls, task_terms, smirl_terms;
  for (const auto mode : {agent::RewardMode::task, agent::RewardMode::combined}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const training::ExperimentConfig cfg = windy_walk_config(mode);
      training::SeedRun run(cfg, seed);
      double falls = 0.0;
      run.train(cfg.episodes, [&](const training::MetricsRow& row) {
        falls += row.stats.falls;
        if (mode == agent::RewardMode::combined) {
          task_terms.push_back(std::abs(row.stats.task_return));
          smirl_terms.push_back(std::abs(cfg.reward.alpha * row.stats.smirl_return));
        }
      });
      (mode == agent::RewardMode::task ? task_falls : combined_falls).push_back(falls / static_cast<double>(cfg.episodes));
    }
  }
  const double tf = detail::mean(task_falls), cf = detail::mean(combined_falls);
  const double ratio = detail::mean(smirl_terms) / detail::mean(task_terms);
  res.pass = cf < tf && ratio >= 0.1 && ratio <= 10.0;
  res.detail = "training fall fraction combined " + detail::fmt(cf, 4) + " vs task " + detail::fmt(tf, 4) +
               " (need strictly lower); |alpha smirl| / |task| = " + detail::fmt(ratio, 3) + " (need within 10x)";
  return res;
}

inline CriterionResult run_criterion(int id) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult res;
  switch (id) {
    case 1: res = density_closed_forms(); break;
    case 2: res = autodiff_probes(); break;
    case 3: res = oracle_optimality(); break;
    case 4: res = delayed_gratification(); break;
    case 5: res = tetris_behavior(); break;
    case 6: res = imitation(); break;
    case 7: res = joint_training(); break;
    case 8: res = latent_mode(); break;
    case 9: res = markov_audits(); break;
    default: throw ContractError("unknown criterion " + std::to_string(id));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

/// "criterion <id> PASS|FAIL <name> (<seconds>s): <detail>"
inline std::string format_result(const CriterionResult& r) {
  std::ostringstream ss;
  ss << "criterion " << r.id << ' ' << (r.pass ? "PASS" : "FAIL") << ' ' << r.name << " (" << std::fixed
     << std::setprecision(1) << r.seconds << "s): " << r.detail;
  return ss.str();
}

}  // namespace smirl::acceptance
