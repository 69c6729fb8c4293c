#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smirl/cli/commands.hpp"

using namespace smirl;
using namespace smirl::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smirl_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

int config_error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kMicroConfig =
    "run_id: micro\n"
    "episodes: 6\n"
    "eval_episodes: 2\n"
    "seeds: [3, 4]\n"
    "env:\n"
    "  id: micro_cmp\n"
    "  micro_cmp:\n"
    "    fixture: corridor\n"
    "agent:\n"
    "  kind: tabular\n";

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST(Config, DefaultsAndOverrides) {
  const auto cfg = parse_config(kMicroConfig);
  EXPECT_EQ(cfg.run_id, "micro");
  EXPECT_EQ(cfg.episodes, 6u);
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(cfg.env.id, "micro_cmp");
  EXPECT_EQ(cfg.env.micro_fixture, "corridor");
  EXPECT_EQ(cfg.agent.kind, agent::AgentKind::tabular);
  EXPECT_EQ(cfg.density.alpha, 1.0);
  EXPECT_EQ(cfg.reward.mode, agent::RewardMode::smirl);
}

TEST(Config, FullRoundTrip) {
  const std::string text =
      "run_id: full\n"
      "episodes: 12\n"
      "max_steps: 30\n"
      "seeds: [1, 2, 3]\n"
      "env:\n"
      "  id: windy_platform\n"
      "  windy_platform: {length: 6.5, belt_velocity: -1, wind_std: 0.2, kick_prob: 0.1, max_steps: 80}\n"
      "density: {kind: gaussian, sigma_min: 0.02}\n"
      "agent:\n"
      "  kind: dqn\n"
      "  eval_epsilon: 0.05\n"
      "  epsilon: {start: 0.9, end: 0.01, fraction: 0.3}\n"
      "  dqn: {hidden: [16, 8], activation: tanh, gamma: 0.95, batch_size: 16, reward_scale: 0.1,\n"
      "        double_q: true, learning_rate: 0.0005, max_grad_norm: 5}\n"
      "reward: {mode: combined, alpha: 0.1, novelty_bin: 0.5}\n";
  const auto a = parse_config(text);
  const auto b = parse_config(format_config(a));
  EXPECT_EQ(format_config(a), format_config(b));
  EXPECT_EQ(b.env.windy_platform.length, 6.5);
  EXPECT_EQ(b.env.windy_platform.belt_velocity, -1.0);
  EXPECT_EQ(b.density.kind, density::DensityKind::gaussian);
  EXPECT_EQ(b.density.sigma_min, 0.02);
  EXPECT_EQ(b.agent.dqn.hidden, (std::vector<std::size_t>{16, 8}));
  EXPECT_EQ(b.agent.dqn.activation, nn::Activation::tanh);
  EXPECT_TRUE(b.agent.dqn.double_q);
  EXPECT_EQ(b.agent.dqn.adam.learning_rate, 0.0005);
  EXPECT_EQ(b.agent.epsilon.fraction, 0.3);
  EXPECT_EQ(b.reward.mode, agent::RewardMode::combined);
  EXPECT_EQ(b.reward.alpha, 0.1);
  EXPECT_EQ(b.max_steps, 30u);
}

TEST(Config, MiniHouseStartsFromPreset) {
  const auto cfg = parse_config("env:\n  id: haunted_house_mini\n  haunted_house: {max_steps: 20}\n");
  EXPECT_EQ(cfg.env.haunted_house.layout, env::haunted_house_mini().layout);
  EXPECT_EQ(cfg.env.haunted_house.max_steps, 20u);
  EXPECT_EQ(cfg.env.haunted_house.enemy_noise, env::haunted_house_mini().enemy_noise);
}

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_EQ(config_error_line("episodes: 3\nenv:\n  id: tetris\n  colour: red\n"), 4);
  EXPECT_EQ(config_error_line("env:\n  id: pong\n"), 2);
  EXPECT_EQ(config_error_line("env:\n  id: tetris\nagent:\n  kind: tabular\n  dqn:\n    gamma: 1.5\n"), 6);
  EXPECT_EQ(config_error_line("env:\n  id: tetris\nreward:\n  mode: greedy\n"), 4);
  EXPECT_EQ(config_error_line("episodes: lots\nenv:\n  id: tetris\n"), 1);
  EXPECT_EQ(config_error_line("env:\n  id: tetris\nseeds: [1, -2]\n"), 3);
  EXPECT_EQ(config_error_line("env:\n  id: tetris\nagent:\n  dqn:\n    hidden: [8, 0]\n"), 5);
  EXPECT_EQ(config_error_line("env:\n  id: tetris\n  tetris: {width: 1}\n"), 3);
  EXPECT_EQ(config_error_line("env: [\n"), 2);
  EXPECT_EQ(config_error_line("run_id: x\n"), 1);
  EXPECT_EQ(config_error_line("env:\n  id: micro_cmp\n  micro_cmp:\n    fixture: maze\n"), 4);
}

TEST(Config, MessagesNameTheKey) {
  try {
    parse_config("env:\n  id: tetris\ndensity:\n  alpha: -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("density.alpha"), std::string::npos);
  }
}

TEST(Config, LatentNeedsVae) {
  EXPECT_THROW(parse_config("env:\n  id: tetris\ndensity: {kind: latent}\n"), ConfigError);
  EXPECT_NO_THROW(parse_config("env:\n  id: tetris\ndensity: {kind: latent}\nvae: {enabled: true}\n"));
}

TEST(Config, ImitationFileResolvesAgainstConfigDir) {
  const auto dir = fresh_dir("imitation");
  write_file(dir / "target.txt", "# two states\n1 0 1\n\n0 1 0  # second\n");
  write_file(dir / "run.yaml", "env:\n  id: tetris\nimitation:\n  path: target.txt\n  repeat: 4\n");
  const auto cfg = load_config((dir / "run.yaml").string());
  EXPECT_EQ(cfg.imitation.states, (std::vector<Observation>{{1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(cfg.imitation.repeat, 4u);
  write_file(dir / "bad.txt", "1 0\n1 x\n");
  write_file(dir / "bad.yaml", "env:\n  id: tetris\nimitation:\n  path: bad.txt\n");
  try {
    load_config((dir / "bad.yaml").string());
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  fs::remove_all(dir);
}

TEST(Checkpoint, RoundTripIsExact) {
  Checkpoint ck;
  ck.config_yaml = "run_id: x\nenv:\n  id: tetris\n";
  ck.archive.meta["seed"] = "7";
  ck.archive.meta["note"] = "has spaces in it";
  ck.archive.arrays["a"] = {0.1, -1e-300, 1.0 / 3.0, 12345678.9, 0.0, -0.0, 1e300, 2.5, 7.0};
  ck.archive.arrays["empty"] = {};
  std::stringstream ss;
  write_checkpoint(ss, ck);
  EXPECT_EQ(lines_of(ss.str()).front(), "SMIRLCKPT 1");
  const auto back = read_checkpoint(ss);
  EXPECT_EQ(back.config_yaml, ck.config_yaml);
  EXPECT_EQ(back.archive.meta, ck.archive.meta);
  EXPECT_EQ(back.archive.arrays, ck.archive.arrays);
}

TEST(Checkpoint, RejectsOtherVersionsAndTruncation) {
  std::istringstream v2("SMIRLCKPT 2\nmeta 0\nconfig 0\nend\n");
  try {
    read_checkpoint(v2);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos);
  }
  std::istringstream junk("hello\n");
  EXPECT_THROW(read_checkpoint(junk), CheckpointError);
  std::istringstream cut("SMIRLCKPT 1\nmeta 0\nconfig 0\narray a 10\n1 2 3\n");
  EXPECT_THROW(read_checkpoint(cut), CheckpointError);
  std::istringstream no_end("SMIRLCKPT 1\nmeta 0\nconfig 0\n");
  EXPECT_THROW(read_checkpoint(no_end), CheckpointError);
}

TEST(Metrics, RealsRoundTrip) {
  for (double x : {0.1, -2.0 / 3.0, 1e-17, 123456.789, 0.0}) EXPECT_EQ(std::stod(format_real(x)), x);
  EXPECT_EQ(format_real(2.0), "2");
}

TEST(Metrics, HeaderAndRowShape) {
  std::stringstream ss;
  write_metrics_header(ss);
  training::MetricsRow r;
  r.run_id = "r";
  r.seed = 2;
  r.episode = 5;
  r.stats.smirl_return = -1.5;
  r.stats.deaths = 3;
  write_metrics_row(ss, r);
  const auto lines = lines_of(ss.str());
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], kMetricsSchema);
  EXPECT_EQ(lines[1], kMetricsColumns);
  EXPECT_EQ(lines[2], "r,2,5,-1.5,0,3,0,0,0,0,0,0");
}

TEST(Metrics, RollingWindowAverages) {
  RollingWindow w(2);
  std::stringstream ss;
  training::MetricsRow r;
  r.run_id = "r";
  for (double d : {1.0, 3.0, 7.0}) {
    r.stats.deaths = d;
    w.add(ss, r);
  }
  const auto lines = lines_of(ss.str());
  EXPECT_NE(lines[0].find(",1,0,0,1,"), std::string::npos);
  EXPECT_NE(lines[1].find(",2,0,0,2,"), std::string::npos);
  EXPECT_NE(lines[2].find(",2,0,0,5,"), std::string::npos);
}

TEST(Commands, TrainWritesDeterministicMetrics) {
  const auto dir = fresh_dir("train");
  write_file(dir / "micro.yaml", kMicroConfig);
  TrainOptions opt;
  opt.config_path = (dir / "micro.yaml").string();
  opt.out = (dir / "a").string();
  std::stringstream out, err;
  ASSERT_EQ(cmd_train(opt, out, err), 0) << err.str();
  opt.out = (dir / "b").string();
  opt.jobs = 2;
  ASSERT_EQ(cmd_train(opt, out, err), 0) << err.str();

  const auto a = read_file(dir / "a" / "metrics.csv");
  EXPECT_EQ(a, read_file(dir / "b" / "metrics.csv"));
  const auto lines = lines_of(a);
  // Schema line, column line, then 6 episodes for each of the 2 seeds.
  ASSERT_EQ(lines.size(), 2u + 12u);
  EXPECT_EQ(lines[0], kMetricsSchema);
  EXPECT_EQ(lines[2].rfind("micro,3,0,", 0), 0u);
  EXPECT_EQ(lines[13].rfind("micro,4,5,", 0), 0u);
  for (const char* f : {"metrics.csv", "rolling.csv", "eval.csv", "checkpoint.txt"}) {
    EXPECT_TRUE(fs::exists(dir / "a" / "seed_3" / f)) << f;
  }
  EXPECT_EQ(lines_of(read_file(dir / "a" / "seed_3" / "eval.csv")).size(), 4u);
  EXPECT_TRUE(fs::exists(dir / "a" / "config.resolved.yaml"));
  fs::remove_all(dir);
}

TEST(Commands, SeedAndEpisodeOverrides) {
  const auto dir = fresh_dir("override");
  write_file(dir / "micro.yaml", kMicroConfig);
  TrainOptions opt;
  opt.config_path = (dir / "micro.yaml").string();
  opt.out = (dir / "o").string();
  opt.seed_override = 9;
  opt.episodes = 3;
  std::stringstream out, err;
  ASSERT_EQ(cmd_train(opt, out, err), 0) << err.str();
  EXPECT_EQ(lines_of(read_file(dir / "o" / "metrics.csv")).size(), 5u);
  EXPECT_TRUE(fs::exists(dir / "o" / "seed_9"));
  EXPECT_FALSE(fs::exists(dir / "o" / "seed_3"));
  fs::remove_all(dir);
}

TEST(Commands, RelativeOutputGoesUnderOutRoot) {
  const auto dir = fresh_dir("outroot");
  write_file(dir / "micro.yaml", kMicroConfig);
  ScopedEnv env(kOutRootEnv, (dir / "root").string());
  EXPECT_EQ(resolve_output_dir("runs/x"), dir / "root" / "runs" / "x");
  EXPECT_EQ(resolve_output_dir("/abs/x"), fs::path("/abs/x"));
  TrainOptions opt;
  opt.config_path = (dir / "micro.yaml").string();
  opt.out = "rel";
  opt.episodes = 1;
  std::stringstream out, err;
  ASSERT_EQ(cmd_train(opt, out, err), 0) << err.str();
  EXPECT_TRUE(fs::exists(dir / "root" / "rel" / "metrics.csv"));
  fs::remove_all(dir);
}

TEST(Commands, BadConfigExitsWithLineNumber) {
  const auto dir = fresh_dir("badcfg");
  write_file(dir / "bad.yaml", "env:\n  id: tetris\nagent:\n  kind: sarsa\n");
  TrainOptions opt;
  opt.config_path = (dir / "bad.yaml").string();
  std::stringstream out, err;
  EXPECT_EQ(cmd_train(opt, out, err), 2);
  EXPECT_NE(err.str().find("line 4"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Commands, EvalFromCheckpoint) {
  const auto dir = fresh_dir("eval");
  write_file(dir / "micro.yaml", kMicroConfig);
  TrainOptions opt;
  opt.config_path = (dir / "micro.yaml").string();
  opt.out = (dir / "run").string();
  std::stringstream out, err;
  ASSERT_EQ(cmd_train(opt, out, err), 0) << err.str();

  EvalOptions ev;
  ev.checkpoint = (dir / "run" / "seed_3" / "checkpoint.txt").string();
  ev.episodes = 4;
  ev.seed = 1;
  ev.out = (dir / "eval1.csv").string();
  ASSERT_EQ(cmd_eval(ev, out, err), 0) << err.str();
  ev.out = (dir / "eval2.csv").string();
  ASSERT_EQ(cmd_eval(ev, out, err), 0) << err.str();
  EXPECT_EQ(read_file(dir / "eval1.csv"), read_file(dir / "eval2.csv"));
  EXPECT_EQ(lines_of(read_file(dir / "eval1.csv")).size(), 6u);

  ev.episodes = 0;
  ev.out = (dir / "eval0.csv").string();
  ASSERT_EQ(cmd_eval(ev, out, err), 0) << err.str();
  EXPECT_EQ(lines_of(read_file(dir / "eval0.csv")), (std::vector<std::string>{kMetricsSchema, kMetricsColumns}));

  ev.checkpoint = (dir / "missing.txt").string();
  EXPECT_EQ(cmd_eval(ev, out, err), 2);
  fs::remove_all(dir);
}

TEST(Commands, OraclePolicyDumpRoundTrip) {
  const auto dir = fresh_dir("oracle");
  OracleOptions opt;
  opt.target = "corridor";
  opt.policy_out = (dir / "policy.txt").string();
  std::stringstream out, err;
  ASSERT_EQ(cmd_oracle(opt, out, err), 0);
  EXPECT_NE(out.str().find("root action 1"), std::string::npos);
  std::ifstream in(opt.policy_out);
  const auto table = read_policy(in, 7);
  const auto cmp = oracle::corridor_fixture();
  const auto sol = oracle::solve(cmp);
  EXPECT_EQ(table, sol.policy);
  EXPECT_NEAR(oracle::policy_eval(cmp, table).value, sol.value, 1e-12);
  fs::remove_all(dir);
}

TEST(Commands, OracleReadsFilesAndReportsParseErrors) {
  const auto dir = fresh_dir("oraclefile");
  write_file(dir / "ok.txt", oracle::format_micro_cmp(oracle::two_state_stay_fixture()));
  write_file(dir / "bad.txt", "states 2\nactions 1\nhorizon 2\np 0 0 0.5\n");
  OracleOptions opt;
  opt.target = (dir / "ok.txt").string();
  std::stringstream out, err;
  ASSERT_EQ(cmd_oracle(opt, out, err), 0);
  EXPECT_NE(out.str().find("root action 0"), std::string::npos);
  opt.target = (dir / "bad.txt").string();
  EXPECT_EQ(cmd_oracle(opt, out, err), 2);
  EXPECT_NE(err.str().find("line 4"), std::string::npos);
  fs::remove_all(dir);
}
