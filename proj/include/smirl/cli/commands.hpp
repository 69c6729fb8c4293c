#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "smirl/cli/checkpoint.hpp"
#include "smirl/cli/config.hpp"
#include "smirl/cli/metrics.hpp"
#include "smirl/oracle/solver.hpp"
#include "smirl/training/trainer.hpp"

namespace smirl::cli {

namespace fs = std::filesystem;

inline constexpr const char* kOutRootEnv = "SMIRL_OUT_ROOT";

struct TrainOptions {
  std::string config_path;
  std::string out;  // replaces the config's output_dir when set
  std::optional<std::uint64_t> seed_override;
  std::optional<std::size_t> episodes;
  std::size_t jobs = 1;
};

/// Relative output directories are placed under $SMIRL_OUT_ROOT when it is set.
inline fs::path resolve_output_dir(const std::string& dir) {
  fs::path p = dir;
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutRootEnv); root != nullptr && *root != '\0') p = fs::path(root) / p;
  }
  return p;
}

inline std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

/// Trains one seed, writing metrics.csv, rolling.csv, checkpoint.txt and
/// (when eval_episodes > 0) eval.csv into `dir`.
inline void train_seed(const training::ExperimentConfig& cfg, std::uint64_t seed, const fs::path& dir) {
  fs::create_directories(dir);
  training::SeedRun run(cfg, seed);
  std::ofstream metrics(dir / "metrics.csv");
  std::ofstream rolling(dir / "rolling.csv");
  if (!metrics || !rolling) throw std::runtime_error("cannot write metrics under '" + dir.string() + "'");
  write_metrics_header(metrics);
  RollingWindow window(100);
  window.write_header(rolling);
  run.train(cfg.episodes, [&](const training::MetricsRow& row) {
    write_metrics_row(metrics, row);
    window.add(rolling, row);
  });

  if (cfg.eval_episodes > 0) {
    std::ofstream eval(dir / "eval.csv");
    write_metrics_header(eval);
    const std::uint64_t eval_seed = derive_seed(seed, "eval");
    const auto trajs = run.rollouts(cfg.eval_episodes, eval_seed, cfg.agent.eval_epsilon);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
      write_metrics_row(eval, {cfg.run_id, seed, i, training::episode_stats(trajs[i]), cfg.agent.eval_epsilon, 0.0});
    }
  }

  Checkpoint ck;
  ck.config_yaml = format_config(cfg);
  run.save(ck.archive);
  ck.archive.meta["epsilon"] = format_real(run.epsilon_at(run.episodes_done()));
  save_checkpoint((dir / "checkpoint.txt").string(), ck);
}

inline int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  training::ExperimentConfig cfg;
  try {
    cfg = load_config(opt.config_path);
  } catch (const ConfigError& e) {
    err << opt.config_path << ": " << e.what() << '\n';
    return 2;
  }
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  if (opt.seed_override) cfg.seeds = {*opt.seed_override};
  if (opt.episodes) cfg.episodes = *opt.episodes;
  const fs::path root = resolve_output_dir(cfg.output_dir);
  try {
    // Constructing a run validates cross-field constraints before any work starts.
    training::SeedRun probe(cfg, cfg.seeds.front());
  } catch (const std::exception& e) {
    err << opt.config_path << ": " << e.what() << '\n';
    return 2;
  }
  fs::create_directories(root);
  {
    std::ofstream resolved(root / "config.resolved.yaml");
    resolved << format_config(cfg);
  }

  std::vector<std::string> errors(cfg.seeds.size());
  auto work = [&](std::size_t i) {
    try {
      train_seed(cfg, cfg.seeds[i], root / seed_dir_name(cfg.seeds[i]));
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, opt.jobs);
  for (std::size_t start = 0; start < cfg.seeds.size(); start += jobs) {
    std::vector<std::thread> pool;
    for (std::size_t i = start; i < std::min(cfg.seeds.size(), start + jobs); ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  }
  int status = 0;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    if (!errors[i].empty()) {
      err << "seed " << cfg.seeds[i] << ": training aborted: " << errors[i] << '\n';
      status = 3;
    }
    parts.push_back((root / seed_dir_name(cfg.seeds[i]) / "metrics.csv").string());
  }
  if (status != 0) return status;
  merge_metrics(parts, (root / "metrics.csv").string());
  out << "trained " << cfg.seeds.size() << " seed(s) x " << cfg.episodes << " episodes -> " << root.string() << '\n';
  return 0;
}

struct EvalOptions {
  std::string checkpoint;
  std::size_t episodes = 10;
  std::uint64_t seed = 0;
  std::optional<double> epsilon;  // defaults to the exploration rate stored in the checkpoint
  std::string out;                // CSV path; empty prints only the summary
};

inline void print_summary(std::ostream& out, const training::Summary& s) {
  auto line = [&](const char* name, const training::Stat& st) {
    out << std::left << std::setw(20) << name << " mean " << format_real(st.mean) << "  std " << format_real(st.std)
        << '\n';
  };
  out << "episodes             " << s.episodes.size() << '\n';
  line("smirl_return", s.smirl_return);
  line("task_return", s.task_return);
  line("deaths", s.deaths);
  line("rows_cleared", s.rows_cleared);
  line("falls", s.falls);
  line("captures", s.captures);
  line("steps_in_safe_room", s.steps_in_safe_room);
}

/// Rebuilds a run from a checkpoint (config + agent state).
inline training::SeedRun restore_run(const Checkpoint& ck) {
  training::ExperimentConfig cfg = parse_config(ck.config_yaml);
  training::SeedRun run(cfg, std::stoull(ck.archive.get("seed")));
  run.load(ck.archive);
  return run;
}

inline int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Checkpoint ck = load_checkpoint(opt.checkpoint);
    training::SeedRun run = restore_run(ck);
    const double eps = opt.epsilon ? *opt.epsilon : std::stod(ck.archive.get("epsilon"));
    const auto trajs = run.rollouts(opt.episodes, opt.seed, eps);
    std::vector<training::EpisodeStats> stats;
    for (const auto& t : trajs) stats.push_back(training::episode_stats(t));
    if (!opt.out.empty()) {
      std::ofstream csv(opt.out);
      if (!csv) throw std::runtime_error("cannot write '" + opt.out + "'");
      write_metrics_header(csv);
      for (std::size_t i = 0; i < stats.size(); ++i) {
        write_metrics_row(csv, {run.config().run_id, opt.seed, i, stats[i], eps, 0.0});
      }
    }
    print_summary(out, training::summarize(std::move(stats)));
    return 0;
  } catch (const std::exception& e) {
    err << "eval: " << e.what() << '\n';
    return 2;
  }
}

inline constexpr const char* kPolicySchema = "# smirl-policy v1";

/// One line per decision node: "<state> <t> <counts...> <action> <value>".
inline void write_policy(std::ostream& out, const oracle::MicroCmp& cmp, const oracle::Solution& sol) {
  out << kPolicySchema << '\n' << "# " << cmp.name << " states " << cmp.states << " horizon " << cmp.horizon
      << " value " << format_real(sol.value) << '\n';
  for (const auto& [node, action] : sol.policy) {
    out << node.state << ' ' << node.t;
    for (int c : node.counts) out << ' ' << c;
    out << ' ' << action << ' ' << format_real(sol.values.at(node)) << '\n';
  }
}

inline oracle::NodePolicy read_policy(std::istream& in, std::size_t states) {
  oracle::NodePolicy table;
  std::string line;
  std::getline(in, line);
  if (line != kPolicySchema) throw std::runtime_error("not a v1 policy dump");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    oracle::BeliefNode node;
    std::size_t action = 0;
    double value = 0.0;
    node.counts.resize(states);
    ss >> node.state >> node.t;
    for (auto& c : node.counts) ss >> c;
    if (!(ss >> action >> value)) throw std::runtime_error("policy line " + std::to_string(lineno) + ": malformed");
    table[node] = action;
  }
  return table;
}

struct OracleOptions {
  std::string target;  // fixture name or MicroCmp file
  std::string policy_out;
  double alpha = 1.0;
};

inline int cmd_oracle(const OracleOptions& opt, std::ostream& out, std::ostream& err) {
  oracle::MicroCmp cmp;
  try {
    const auto names = oracle::fixture_names();
    if (std::find(names.begin(), names.end(), opt.target) != names.end()) {
      cmp = oracle::named_fixture(opt.target);
    } else {
      cmp = oracle::load_micro_cmp(opt.target);
    }
  } catch (const std::exception& e) {
    err << opt.target << ": " << e.what() << '\n';
    return 2;
  }
  const oracle::Solution sol = oracle::solve(cmp, opt.alpha);
  out << "instance " << cmp.name << '\n' << "V* " << format_real(sol.value) << '\n';
  out << "root action " << sol.policy.at(oracle::root_node(cmp)) << '\n';
  out << "decision nodes " << sol.policy.size() << '\n';
  if (!opt.policy_out.empty()) {
    std::ofstream f(opt.policy_out);
    if (!f) {
      err << "cannot write '" << opt.policy_out << "'\n";
      return 2;
    }
    write_policy(f, cmp, sol);
  } else {
    write_policy(out, cmp, sol);
  }
  return 0;
}

}  // namespace smirl::cli
