#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smirl/cli/acceptance.hpp"
#include "smirl/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"smirl: surprise-minimizing RL experiments"};
  app.require_subcommand(1);

  smirl::cli::TrainOptions train;
  std::uint64_t seed_override = 0;
  std::size_t episodes = 0;
  auto* train_cmd = app.add_subcommand("train", "Train every seed listed in a config");
  train_cmd->add_option("--config", train.config_path, "YAML experiment config")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train.out, "Output directory (relative paths go under $SMIRL_OUT_ROOT)");
  auto* seed_opt = train_cmd->add_option("--seed-override", seed_override, "Train this single seed instead");
  auto* ep_opt = train_cmd->add_option("--episodes", episodes, "Override the episode count")->check(CLI::PositiveNumber);
  train_cmd->add_option("--jobs", train.jobs, "Seeds trained in parallel")->check(CLI::PositiveNumber);

  smirl::cli::EvalOptions eval;
  double epsilon = 0.0;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "checkpoint.txt written by train")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--episodes", eval.episodes, "Evaluation episodes");
  eval_cmd->add_option("--seed", eval.seed, "Evaluation seed");
  auto* eps_opt = eval_cmd->add_option("--epsilon", epsilon, "Exploration rate (default: value stored in the checkpoint)")
                      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--out", eval.out, "Per-episode CSV");

  smirl::cli::OracleOptions oracle;
  auto* oracle_cmd = app.add_subcommand("oracle", "Solve a MicroCmp exactly");
  oracle_cmd->add_option("target", oracle.target, "Fixture name (two-state-stay, corridor, chain) or MicroCmp file")
      ->required();
  oracle_cmd->add_option("--policy-out", oracle.policy_out, "Write the policy table here instead of stdout");
  oracle_cmd->add_option("--alpha", oracle.alpha, "Laplace pseudo-count")->check(CLI::PositiveNumber);

  std::vector<int> criteria;
  auto* accept_cmd = app.add_subcommand("accept", "Run the acceptance criteria");
  accept_cmd->add_option("--criterion", criteria, "Criterion ids (default: all)")
      ->check(CLI::Range(1, smirl::acceptance::kCriterionCount));

  CLI11_PARSE(app, argc, argv);

  if (*train_cmd) {
    if (*seed_opt) train.seed_override = seed_override;
    if (*ep_opt) train.episodes = episodes;
    return smirl::cli::cmd_train(train, std::cout, std::cerr);
  }
  if (*eval_cmd) {
    if (*eps_opt) eval.epsilon = epsilon;
    return smirl::cli::cmd_eval(eval, std::cout, std::cerr);
  }
  if (*oracle_cmd) return smirl::cli::cmd_oracle(oracle, std::cout, std::cerr);

  if (criteria.empty()) {
    for (int i = 1; i <= smirl::acceptance::kCriterionCount; ++i) criteria.push_back(i);
  }
  bool all = true;
  for (int id : criteria) {
    const auto r = smirl::acceptance::run_criterion(id);
    std::cout << smirl::acceptance::format_result(r) << std::endl;
    all = all && r.pass;
  }
  return all ? 0 : 1;
}
