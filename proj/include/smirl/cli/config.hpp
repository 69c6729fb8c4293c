#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "smirl/training/experiment.hpp"

namespace smirl::cli {

/// Invalid configuration; `line` is 1-based (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

/// A mapping node whose keys are consumed one by one; leftovers are errors.
class Block {
 public:
  Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) throw ConfigError(line_of(node_), "'" + path_ + "' must be a mapping");
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  int line() const { return line_of(node_); }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_[key];
  }

  Block block(const std::string& key) { return Block(raw(key), path_ + "." + key); }

  template <class T>
  void get(const std::string& key, T& out, const std::function<bool(const T&)>& ok = {}, const char* rule = "") {
    if (!has(key)) return;
    const YAML::Node n = raw(key);
    out = convert<T>(n, key);
    if (ok && !ok(out)) throw ConfigError(line_of(n), "'" + path_ + "." + key + "' " + rule);
  }

  void size(const std::string& key, std::size_t& out, std::size_t min = 0) {
    if (!has(key)) return;
    const YAML::Node n = raw(key);
    const auto v = convert<long long>(n, key);
    if (v < static_cast<long long>(min)) {
      throw ConfigError(line_of(n), "'" + path_ + "." + key + "' must be an integer >= " + std::to_string(min));
    }
    out = static_cast<std::size_t>(v);
  }

  void sizes(const std::string& key, std::vector<std::size_t>& out, std::size_t min = 1) {
    if (!has(key)) return;
    const YAML::Node n = raw(key);
    if (!n.IsSequence()) throw ConfigError(line_of(n), "'" + path_ + "." + key + "' must be a list");
    out.clear();
    for (const auto& item : n) {
      const auto v = convert<long long>(item, key);
      if (v < static_cast<long long>(min)) {
        throw ConfigError(line_of(item), "'" + path_ + "." + key + "' entries must be integers >= " + std::to_string(min));
      }
      out.push_back(static_cast<std::size_t>(v));
    }
  }

  /// Parses an enum-like string with `parse`, turning its failure into a line-numbered error.
  template <class T, class F>
  void choice(const std::string& key, T& out, F parse) {
    if (!has(key)) return;
    const YAML::Node n = raw(key);
    const auto s = convert<std::string>(n, key);
    try {
      out = parse(s);
    } catch (const std::exception& e) {
      throw ConfigError(line_of(n), "'" + path_ + "." + key + "': " + e.what());
    }
  }

  void finish() const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(line_of(kv.first), "unknown key '" + path_ + "." + key + "'");
    }
  }

 private:
  template <class T>
  T convert(const YAML::Node& n, const std::string& key) const {
    try {
      if (!n.IsScalar()) throw YAML::BadConversion(n.Mark());
      return n.as<T>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(line_of(n), "'" + path_ + "." + key + "' has the wrong type");
    }
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline bool non_negative(const double& x) { return x >= 0.0 && std::isfinite(x); }
inline bool positive(const double& x) { return x > 0.0 && std::isfinite(x); }
inline bool unit_interval(const double& x) { return x >= 0.0 && x <= 1.0; }

inline void read_bins(Block b, agent::Bins& bins) {
  b.get<double>("lo", bins.lo);
  b.get<double>("hi", bins.hi);
  b.size("count", bins.count, 1);
  if (!(bins.hi > bins.lo)) throw ConfigError(b.line(), "bin range needs hi > lo");
  b.finish();
}

}  // namespace detail

/// States for D_0: one observation per line as whitespace-separated numbers;
/// blank lines and '#' comments are skipped.
inline std::vector<Observation> load_states(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open imitation file '" + path + "'");
  std::vector<Observation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ss(line);
    Observation s;
    std::string tok;
    while (ss >> tok) {
      try {
        std::size_t used = 0;
        s.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ConfigError(lineno, path + ": '" + tok + "' is not a number");
      }
    }
    if (s.empty()) continue;
    if (!out.empty() && s.size() != out.front().size()) {
      throw ConfigError(lineno, path + ": state has " + std::to_string(s.size()) + " entries, expected " +
                                    std::to_string(out.front().size()));
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ConfigError(0, path + ": no states");
  return out;
}

/// Parses YAML text. Relative file references resolve against `base_dir`.
inline training::ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".") {
  using namespace detail;
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.mark.line + 1, "YAML syntax error: " + e.msg);
  }
  if (!root || root.IsNull()) throw ConfigError(0, "empty config");
  training::ExperimentConfig cfg;
  Block top(root, "config");

  top.get<std::string>("run_id", cfg.run_id);
  top.size("episodes", cfg.episodes, 0);
  top.size("eval_episodes", cfg.eval_episodes, 0);
  top.size("max_steps", cfg.max_steps, 0);
  top.get<std::string>("output_dir", cfg.output_dir);
  top.get<bool>("record_wall_time", cfg.record_wall_time);
  if (top.has("seeds")) {
    const YAML::Node n = top.raw("seeds");
    if (!n.IsSequence() || n.size() == 0) throw ConfigError(line_of(n), "'config.seeds' must be a non-empty list");
    cfg.seeds.clear();
    for (const auto& item : n) {
      try {
        const auto v = item.as<long long>();
        if (v < 0) throw YAML::BadConversion(item.Mark());
        cfg.seeds.push_back(static_cast<std::uint64_t>(v));
      } catch (const YAML::BadConversion&) {
        throw ConfigError(line_of(item), "'config.seeds' entries must be non-negative integers");
      }
    }
  }

  if (!top.has("env")) throw ConfigError(top.line(), "missing 'env' block");
  {
    Block e = top.block("env");
    if (!e.has("id")) throw ConfigError(e.line(), "missing 'env.id'");
    const YAML::Node idn = e.raw("id");
    const auto id = idn.as<std::string>();
    const auto ids = training::environment_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
      throw ConfigError(line_of(idn), "unknown environment id '" + id + "'");
    }
    training::select_environment(cfg.env, id);
    if (e.has("tetris")) {
      Block t = e.block("tetris");
      t.get<int>("width", cfg.env.tetris.width, [](const int& v) { return v >= 2; }, "must be >= 2");
      t.get<int>("height", cfg.env.tetris.height, [](const int& v) { return v >= 3; }, "must be >= 3");
      t.size("max_steps", cfg.env.tetris.max_steps, 1);
      t.finish();
    }
    if (e.has("haunted_house")) {
      Block h = e.block("haunted_house");
      auto& hh = cfg.env.haunted_house;
      if (h.has("layout")) {
        const YAML::Node n = h.raw("layout");
        if (!n.IsSequence()) throw ConfigError(line_of(n), "'env.haunted_house.layout' must be a list of rows");
        hh.layout.clear();
        for (const auto& row : n) hh.layout.push_back(row.as<std::string>());
      }
      h.get<int>("view_radius", hh.view_radius, [](const int& v) { return v >= 0; }, "must be >= 0");
      h.get<int>("doors_open", hh.doors_open, [](const int& v) { return v >= 1; }, "must be >= 1");
      h.size("max_steps", hh.max_steps, 1);
      h.get<double>("enemy_noise", hh.enemy_noise, unit_interval, "must be in [0, 1]");
      h.get<int>("enemy_period", hh.enemy_period, [](const int& v) { return v >= 1; }, "must be >= 1");
      h.finish();
    }
    if (e.has("windy_platform")) {
      Block w = e.block("windy_platform");
      auto& wp = cfg.env.windy_platform;
      w.get<double>("length", wp.length, positive, "must be > 0");
      w.get<double>("belt_velocity", wp.belt_velocity);
      w.get<double>("wind_mean", wp.wind_mean);
      w.get<double>("wind_std", wp.wind_std, non_negative, "must be >= 0");
      w.get<double>("kick_prob", wp.kick_prob, unit_interval, "must be in [0, 1]");
      w.get<double>("kick_std", wp.kick_std, non_negative, "must be >= 0");
      w.get<double>("thrust", wp.thrust, non_negative, "must be >= 0");
      w.get<double>("damping", wp.damping, non_negative, "must be >= 0");
      w.get<double>("dt", wp.dt, positive, "must be > 0");
      w.get<double>("fall_noise", wp.fall_noise, non_negative, "must be >= 0");
      w.get<double>("target_velocity", wp.target_velocity);
      w.size("max_steps", wp.max_steps, 1);
      w.finish();
    }
    if (e.has("micro_cmp")) {
      Block m = e.block("micro_cmp");
      if (m.has("fixture")) {
        const YAML::Node n = m.raw("fixture");
        cfg.env.micro_fixture = n.as<std::string>();
        const auto names = oracle::fixture_names();
        if (std::find(names.begin(), names.end(), cfg.env.micro_fixture) == names.end()) {
          throw ConfigError(line_of(n), "unknown micro_cmp fixture '" + cfg.env.micro_fixture + "'");
        }
      }
      if (m.has("file")) {
        const YAML::Node n = m.raw("file");
        std::filesystem::path p = n.as<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        cfg.env.micro_file = p.string();
        try {
          oracle::load_micro_cmp(cfg.env.micro_file);
        } catch (const std::exception& ex) {
          throw ConfigError(line_of(n), std::string("micro_cmp file: ") + ex.what());
        }
      }
      m.finish();
    }
    e.finish();
  }

  if (top.has("density")) {
    Block d = top.block("density");
    d.choice("kind", cfg.density.kind, density::parse_density_kind);
    d.get<double>("alpha", cfg.density.alpha, non_negative, "must be >= 0");
    d.get<double>("sigma_min", cfg.density.sigma_min, positive, "must be > 0");
    d.finish();
  }

  if (top.has("agent")) {
    Block a = top.block("agent");
    a.choice("kind", cfg.agent.kind, agent::parse_agent_kind);
    a.get<double>("eval_epsilon", cfg.agent.eval_epsilon, unit_interval, "must be in [0, 1]");
    if (a.has("epsilon")) {
      Block e = a.block("epsilon");
      e.get<double>("start", cfg.agent.epsilon.start, unit_interval, "must be in [0, 1]");
      e.get<double>("end", cfg.agent.epsilon.end, unit_interval, "must be in [0, 1]");
      e.get<double>("fraction", cfg.agent.epsilon.fraction, unit_interval, "must be in [0, 1]");
      e.finish();
    }
    if (a.has("tabular")) {
      Block t = a.block("tabular");
      auto& tc = cfg.agent.tabular;
      t.get<double>("gamma", tc.gamma, unit_interval, "must be in [0, 1]");
      t.get<double>("learning_rate", tc.learning_rate, unit_interval, "must be in [0, 1]");
      t.get<bool>("visit_count_lr", tc.visit_count_lr);
      if (t.has("observation_bins")) read_bins(t.block("observation_bins"), tc.discretization.observation);
      if (t.has("theta_bins")) read_bins(t.block("theta_bins"), tc.discretization.theta);
      if (t.has("time_bins")) read_bins(t.block("time_bins"), tc.discretization.time);
      t.finish();
    }
    if (a.has("dqn")) {
      Block q = a.block("dqn");
      auto& dc = cfg.agent.dqn;
      q.sizes("hidden", dc.hidden);
      q.choice("activation", dc.activation, nn::parse_activation);
      q.get<double>("gamma", dc.gamma, unit_interval, "must be in [0, 1]");
      q.size("batch_size", dc.batch_size, 1);
      q.size("buffer_capacity", dc.buffer_capacity, 1);
      q.size("target_sync_every", dc.target_sync_every, 1);
      q.size("updates_per_episode", dc.updates_per_episode, 0);
      q.size("learning_starts", dc.learning_starts, 0);
      q.get<double>("reward_scale", dc.reward_scale, positive, "must be > 0");
      q.get<bool>("double_q", dc.double_q);
      q.get<double>("learning_rate", dc.adam.learning_rate, positive, "must be > 0");
      q.get<double>("max_grad_norm", dc.adam.max_grad_norm, non_negative, "must be >= 0");
      q.finish();
    }
    a.finish();
  }

  if (top.has("reward")) {
    Block r = top.block("reward");
    r.choice("mode", cfg.reward.mode, agent::parse_reward_mode);
    r.get<double>("alpha", cfg.reward.alpha, non_negative, "must be >= 0");
    r.get<double>("novelty_beta", cfg.reward.novelty_beta, non_negative, "must be >= 0");
    r.get<double>("novelty_bin", cfg.reward.novelty_bin, positive, "must be > 0");
    r.finish();
  }

  if (top.has("vae")) {
    Block v = top.block("vae");
    auto& vb = cfg.vae;
    v.get<bool>("enabled", vb.enabled);
    v.size("latent_dim", vb.latent_dim, 1);
    v.get<double>("beta", vb.beta, positive, "must be > 0");
    v.sizes("hidden", vb.hidden);
    v.choice("activation", vb.activation, nn::parse_activation);
    v.choice("reconstruction", vb.reconstruction, nn::parse_reconstruction);
    v.get<double>("learning_rate", vb.learning_rate, positive, "must be > 0");
    v.size("batch_size", vb.batch_size, 1);
    v.size("steps_per_episode", vb.steps_per_episode, 0);
    v.size("pool_capacity", vb.pool_capacity, 1);
    v.finish();
  }

  if (top.has("imitation")) {
    Block im = top.block("imitation");
    im.size("repeat", cfg.imitation.repeat, 1);
    if (im.has("path")) {
      const YAML::Node n = im.raw("path");
      std::filesystem::path p = n.as<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      cfg.imitation.path = p.string();
      try {
        cfg.imitation.states = load_states(cfg.imitation.path);
      } catch (const ConfigError& ex) {
        throw ConfigError(line_of(n), std::string("imitation: ") + ex.what());
      }
    }
    im.finish();
  }
  top.finish();

  if (cfg.density.kind == density::DensityKind::latent && !cfg.vae.enabled) {
    throw ConfigError(top.line(), "density kind 'latent' needs 'vae.enabled: true'");
  }
  return cfg;
}

inline training::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), dir.empty() ? "." : dir.string());
}

/// Fully resolved config as YAML; parse_config(format_config(c)) reproduces c.
inline std::string format_config(const training::ExperimentConfig& c) {
  YAML::Emitter out;
  // Shortest text that reads back to the same double.
  auto real = [](double x) {
    char buf[64];
    return std::string(buf, std::to_chars(buf, buf + sizeof(buf), x).ptr);
  };
  auto bins = [&](const char* name, const agent::Bins& b) {
    out << YAML::Key << name << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "lo" << YAML::Value << real(b.lo)
        << YAML::Key << "hi" << YAML::Value << real(b.hi) << YAML::Key << "count" << YAML::Value << b.count << YAML::EndMap;
  };
  out << YAML::BeginMap;
  out << YAML::Key << "run_id" << YAML::Value << c.run_id;
  out << YAML::Key << "episodes" << YAML::Value << c.episodes;
  out << YAML::Key << "eval_episodes" << YAML::Value << c.eval_episodes;
  out << YAML::Key << "max_steps" << YAML::Value << c.max_steps;
  out << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::Key << "record_wall_time" << YAML::Value << c.record_wall_time;

  out << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << c.env.id;
  out << YAML::Key << "tetris" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "width" << YAML::Value << c.env.tetris.width;
  out << YAML::Key << "height" << YAML::Value << c.env.tetris.height;
  out << YAML::Key << "max_steps" << YAML::Value << c.env.tetris.max_steps;
  out << YAML::EndMap;
  const auto& hh = c.env.haunted_house;
  out << YAML::Key << "haunted_house" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "layout" << YAML::Value << hh.layout;
  out << YAML::Key << "view_radius" << YAML::Value << hh.view_radius;
  out << YAML::Key << "doors_open" << YAML::Value << hh.doors_open;
  out << YAML::Key << "max_steps" << YAML::Value << hh.max_steps;
  out << YAML::Key << "enemy_noise" << YAML::Value << real(hh.enemy_noise);
  out << YAML::Key << "enemy_period" << YAML::Value << hh.enemy_period;
  out << YAML::EndMap;
  const auto& wp = c.env.windy_platform;
  out << YAML::Key << "windy_platform" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "length" << YAML::Value << real(wp.length);
  out << YAML::Key << "belt_velocity" << YAML::Value << real(wp.belt_velocity);
  out << YAML::Key << "wind_mean" << YAML::Value << real(wp.wind_mean);
  out << YAML::Key << "wind_std" << YAML::Value << real(wp.wind_std);
  out << YAML::Key << "kick_prob" << YAML::Value << real(wp.kick_prob);
  out << YAML::Key << "kick_std" << YAML::Value << real(wp.kick_std);
  out << YAML::Key << "thrust" << YAML::Value << real(wp.thrust);
  out << YAML::Key << "damping" << YAML::Value << real(wp.damping);
  out << YAML::Key << "dt" << YAML::Value << real(wp.dt);
  out << YAML::Key << "fall_noise" << YAML::Value << real(wp.fall_noise);
  out << YAML::Key << "target_velocity" << YAML::Value << real(wp.target_velocity);
  out << YAML::Key << "max_steps" << YAML::Value << wp.max_steps;
  out << YAML::EndMap;
  out << YAML::Key << "micro_cmp" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "fixture" << YAML::Value << c.env.micro_fixture;
  if (!c.env.micro_file.empty()) out << YAML::Key << "file" << YAML::Value << std::filesystem::absolute(c.env.micro_file).string();
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "density" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << density::to_string(c.density.kind);
  out << YAML::Key << "alpha" << YAML::Value << real(c.density.alpha);
  out << YAML::Key << "sigma_min" << YAML::Value << real(c.density.sigma_min);
  out << YAML::EndMap;

  out << YAML::Key << "agent" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << agent::to_string(c.agent.kind);
  out << YAML::Key << "eval_epsilon" << YAML::Value << real(c.agent.eval_epsilon);
  out << YAML::Key << "epsilon" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "start" << YAML::Value << real(c.agent.epsilon.start);
  out << YAML::Key << "end" << YAML::Value << real(c.agent.epsilon.end);
  out << YAML::Key << "fraction" << YAML::Value << real(c.agent.epsilon.fraction);
  out << YAML::EndMap;
  const auto& tc = c.agent.tabular;
  out << YAML::Key << "tabular" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "gamma" << YAML::Value << real(tc.gamma);
  out << YAML::Key << "learning_rate" << YAML::Value << real(tc.learning_rate);
  out << YAML::Key << "visit_count_lr" << YAML::Value << tc.visit_count_lr;
  bins("observation_bins", tc.discretization.observation);
  bins("theta_bins", tc.discretization.theta);
  bins("time_bins", tc.discretization.time);
  out << YAML::EndMap;
  const auto& dc = c.agent.dqn;
  out << YAML::Key << "dqn" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "hidden" << YAML::Value << YAML::Flow << dc.hidden;
  out << YAML::Key << "activation" << YAML::Value << nn::to_string(dc.activation);
  out << YAML::Key << "gamma" << YAML::Value << real(dc.gamma);
  out << YAML::Key << "batch_size" << YAML::Value << dc.batch_size;
  out << YAML::Key << "buffer_capacity" << YAML::Value << dc.buffer_capacity;
  out << YAML::Key << "target_sync_every" << YAML::Value << dc.target_sync_every;
  out << YAML::Key << "updates_per_episode" << YAML::Value << dc.updates_per_episode;
  out << YAML::Key << "learning_starts" << YAML::Value << dc.learning_starts;
  out << YAML::Key << "reward_scale" << YAML::Value << real(dc.reward_scale);
  out << YAML::Key << "double_q" << YAML::Value << dc.double_q;
  out << YAML::Key << "learning_rate" << YAML::Value << real(dc.adam.learning_rate);
  out << YAML::Key << "max_grad_norm" << YAML::Value << real(dc.adam.max_grad_norm);
  out << YAML::EndMap;
  out << YAML::EndMap;

  out << YAML::Key << "reward" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << agent::to_string(c.reward.mode);
  out << YAML::Key << "alpha" << YAML::Value << real(c.reward.alpha);
  out << YAML::Key << "novelty_beta" << YAML::Value << real(c.reward.novelty_beta);
  out << YAML::Key << "novelty_bin" << YAML::Value << real(c.reward.novelty_bin);
  out << YAML::EndMap;

  const auto& vb = c.vae;
  out << YAML::Key << "vae" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "enabled" << YAML::Value << vb.enabled;
  out << YAML::Key << "latent_dim" << YAML::Value << vb.latent_dim;
  out << YAML::Key << "beta" << YAML::Value << real(vb.beta);
  out << YAML::Key << "hidden" << YAML::Value << YAML::Flow << vb.hidden;
  out << YAML::Key << "activation" << YAML::Value << nn::to_string(vb.activation);
  out << YAML::Key << "reconstruction" << YAML::Value << nn::to_string(vb.reconstruction);
  out << YAML::Key << "learning_rate" << YAML::Value << real(vb.learning_rate);
  out << YAML::Key << "batch_size" << YAML::Value << vb.batch_size;
  out << YAML::Key << "steps_per_episode" << YAML::Value << vb.steps_per_episode;
  out << YAML::Key << "pool_capacity" << YAML::Value << vb.pool_capacity;
  out << YAML::EndMap;

  out << YAML::Key << "imitation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "repeat" << YAML::Value << c.imitation.repeat;
  if (!c.imitation.path.empty()) {
    out << YAML::Key << "path" << YAML::Value << std::filesystem::absolute(c.imitation.path).string();
  }
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace smirl::cli
