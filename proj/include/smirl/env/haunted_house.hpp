#pragma once

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <string>
#include <vector>

#include "smirl/core/random.hpp"
#include "smirl/env/environment.hpp"

namespace smirl::env {

/// Layout characters:
///   '#' wall          '.' floor (enemies may walk here)
///   'S' safe room     'd' door candidate (wall unless opened this episode)
///   'A' agent start   'E' enemy start
/// 'A' and 'E' cells are floor.
struct HauntedHouseConfig {
  std::vector<std::string> layout = {
      "#############",
      "#E....#SSSSS#",
      "#.###.dSSSSS#",
      "#A....dSSSSS#",
      "#.###.dSSSSS#",
      "#E....#SSSSS#",
      "#############",
  };
  int view_radius = 2;
  int doors_open = 1;
  std::size_t max_steps = 60;
  double enemy_noise = 0.0;  // probability an enemy takes a uniformly random move instead
  int enemy_period = 1;      // enemies move on every k-th step
};

/// Small preset used by tests and the delayed-gratification runs: four
/// mostly-random enemies make the start room noisy, the one-wide safe column
/// behind the door next to the start is quiet.
inline HauntedHouseConfig haunted_house_mini() {
  HauntedHouseConfig cfg;
  cfg.layout = {
      "#######",
      "#E.E#S#",
      "#...#S#",
      "#..AdS#",
      "#...#S#",
      "#E.E#S#",
      "#######",
  };
  cfg.view_radius = 1;
  cfg.max_steps = 48;
  cfg.enemy_noise = 0.75;
  return cfg;
}

struct GridPos {
  int x = 0;
  int y = 0;
  friend bool operator==(const GridPos&, const GridPos&) = default;
};

enum class CellCode : int { wall = 0, empty = 1, door = 2, enemy = 3, out_of_view = 4 };
inline constexpr int kCellCodes = 5;

/// Static map plus the open doors of the current episode. Enemy pursuit is a
/// pure function of this and the positions, so it can be tested in isolation.
class HouseMap {
 public:
  HouseMap() = default;
  explicit HouseMap(const std::vector<std::string>& layout) {
    require(!layout.empty(), "HauntedHouse: empty layout");
    height_ = static_cast<int>(layout.size());
    width_ = static_cast<int>(layout.front().size());
    cells_.reserve(static_cast<std::size_t>(width_ * height_));
    for (int y = 0; y < height_; ++y) {
      require(static_cast<int>(layout[static_cast<std::size_t>(y)].size()) == width_,
              "HauntedHouse: ragged layout row " + std::to_string(y));
      for (int x = 0; x < width_; ++x) {
        char c = layout[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
        switch (c) {
          case 'A':
            agent_start_ = {x, y};
            agent_found_ = true;
            c = '.';
            break;
          case 'E':
            enemy_starts_.push_back({x, y});
            c = '.';
            break;
          case 'd':
            door_candidates_.push_back({x, y});
            break;
          case '#':
          case '.':
          case 'S':
            break;
          default:
            throw ContractError(std::string("HauntedHouse: unknown layout character '") + c + "'");
        }
        cells_.push_back(c);
      }
    }
    require(agent_found_, "HauntedHouse: layout has no agent start 'A'");
    require(!door_candidates_.empty(), "HauntedHouse: layout has no door candidates 'd'");
    open_.assign(cells_.size(), false);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  GridPos agent_start() const { return agent_start_; }
  const std::vector<GridPos>& enemy_starts() const { return enemy_starts_; }
  const std::vector<GridPos>& door_candidates() const { return door_candidates_; }

  bool inside(GridPos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
  char raw(GridPos p) const { return cells_[idx(p)]; }
  bool is_safe(GridPos p) const { return inside(p) && raw(p) == 'S'; }
  bool is_open_door(GridPos p) const { return inside(p) && raw(p) == 'd' && open_[idx(p)]; }
  bool agent_passable(GridPos p) const {
    if (!inside(p)) return false;
    const char c = raw(p);
    return c == '.' || c == 'S' || (c == 'd' && open_[idx(p)]);
  }
  // Enemies stay on plain floor: never doors, never the safe room.
  bool enemy_passable(GridPos p) const { return inside(p) && raw(p) == '.'; }

  void set_open_doors(const std::vector<GridPos>& doors) {
    std::fill(open_.begin(), open_.end(), false);
    for (const auto& d : doors) {
      require(inside(d) && raw(d) == 'd', "HauntedHouse: door outside candidate set");
      open_[idx(d)] = true;
    }
  }

  /// True when some safe cell is reachable from `from` for the agent.
  bool safe_room_reachable(GridPos from) const {
    std::vector<bool> seen(cells_.size(), false);
    std::deque<GridPos> queue{from};
    seen[idx(from)] = true;
    while (!queue.empty()) {
      const GridPos p = queue.front();
      queue.pop_front();
      if (is_safe(p)) return true;
      for (const GridPos d : {GridPos{1, 0}, GridPos{-1, 0}, GridPos{0, 1}, GridPos{0, -1}}) {
        const GridPos q{p.x + d.x, p.y + d.y};
        if (agent_passable(q) && !seen[idx(q)]) {
          seen[idx(q)] = true;
          queue.push_back(q);
        }
      }
    }
    return false;
  }

 private:
  std::size_t idx(GridPos p) const { return static_cast<std::size_t>(p.y * width_ + p.x); }

  int width_ = 0;
  int height_ = 0;
  std::vector<char> cells_;
  std::vector<bool> open_;
  GridPos agent_start_{};
  bool agent_found_ = false;
  std::vector<GridPos> enemy_starts_;
  std::vector<GridPos> door_candidates_;
};

/// Greedy pursuit: step along x toward the agent if that reduces the
/// Manhattan distance and the cell is enterable, otherwise along y, otherwise
/// stay. Every reducing step shortens the distance by one, so the fixed x-then-y
/// order is the tie-break.
inline GridPos greedy_enemy_move(const HouseMap& map, GridPos enemy, GridPos agent) {
  const int dx = agent.x - enemy.x;
  const int dy = agent.y - enemy.y;
  if (dx != 0) {
    const GridPos q{enemy.x + (dx > 0 ? 1 : -1), enemy.y};
    if (map.enemy_passable(q)) return q;
  }
  if (dy != 0) {
    const GridPos q{enemy.x, enemy.y + (dy > 0 ? 1 : -1)};
    if (map.enemy_passable(q)) return q;
  }
  return enemy;
}

inline std::vector<GridPos> greedy_enemy_policy(const HouseMap& map, const std::vector<GridPos>& enemies,
                                                GridPos agent) {
  std::vector<GridPos> next;
  next.reserve(enemies.size());
  for (const auto& e : enemies) next.push_back(greedy_enemy_move(map, e, agent));
  return next;
}

/// Navigation under pursuit. Actions: 0 stay, 1 up, 2 down, 3 left, 4 right.
/// The agent moves first, then the enemies. When an enemy shares the agent's
/// cell the agent and all enemies return to their start cells and the episode
/// continues. Door cells are drawn uniformly from the candidates each reset.
///
/// Observation: egocentric (2r+1)x(2r+1) window, row-major from the top-left,
/// each cell one-hot over {wall, empty, door, enemy, out-of-view}; cells off
/// the map are out-of-view. Task reward = 1 while inside the safe room.
class HauntedHouseEnv final : public Environment {
 public:
  static constexpr std::size_t kStay = 0;

  explicit HauntedHouseEnv(HauntedHouseConfig cfg = {}) : cfg_(std::move(cfg)), map_(cfg_.layout) {
    require(cfg_.view_radius >= 0, "HauntedHouse: view_radius must be >= 0");
    require(cfg_.doors_open >= 1 &&
                cfg_.doors_open <= static_cast<int>(map_.door_candidates().size()),
            "HauntedHouse: doors_open must be in [1, #candidates]");
    require(cfg_.enemy_period >= 1, "HauntedHouse: enemy_period must be >= 1");
    require(cfg_.enemy_noise >= 0.0 && cfg_.enemy_noise <= 1.0, "HauntedHouse: enemy_noise must be in [0,1]");
    require(cfg_.max_steps >= 1, "HauntedHouse: max_steps must be >= 1");
    for (const auto& e : map_.enemy_starts()) {
      require(map_.enemy_passable(e), "HauntedHouse: enemy start must be floor");
    }
  }

  EnvSpec spec() const override {
    const auto side = static_cast<std::size_t>(2 * cfg_.view_radius + 1);
    return {side * side * kCellCodes, ObsKind::binary, 5, cfg_.max_steps};
  }
  std::string name() const override { return "haunted_house"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<HauntedHouseEnv>(*this); }

  const HouseMap& map() const { return map_; }
  GridPos agent() const { return agent_; }
  const std::vector<GridPos>& enemies() const { return enemies_; }
  const std::vector<GridPos>& open_doors() const { return doors_; }

  Observation observation() const {
    Observation obs(spec().obs_dim, 0.0);
    const int r = cfg_.view_radius;
    std::size_t k = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx, ++k) {
        obs[k * kCellCodes + static_cast<std::size_t>(code_at({agent_.x + dx, agent_.y + dy}))] = 1.0;
      }
    }
    return obs;
  }

 protected:
  Observation do_reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    const auto& candidates = map_.door_candidates();
    for (int attempt = 0;; ++attempt) {
      require(attempt < 1000, "HauntedHouse: no door placement connects the start to the safe room");
      std::vector<std::size_t> order(candidates.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng_);
      doors_.clear();
      for (int i = 0; i < cfg_.doors_open; ++i) doors_.push_back(candidates[order[static_cast<std::size_t>(i)]]);
      map_.set_open_doors(doors_);
      if (map_.safe_room_reachable(map_.agent_start())) break;
    }
    agent_ = map_.agent_start();
    enemies_ = map_.enemy_starts();
    return observation();
  }

  StepOutcome do_step(std::size_t action) override {
    StepOutcome out;
    const GridPos target = moved(agent_, action);
    if (map_.agent_passable(target)) agent_ = target;

    bool caught = occupied_by_enemy(agent_);
    if (!caught && (time() + 1) % static_cast<std::size_t>(cfg_.enemy_period) == 0) {
      std::vector<GridPos> next = greedy_enemy_policy(map_, enemies_, agent_);
      if (cfg_.enemy_noise > 0.0) {
        for (std::size_t i = 0; i < next.size(); ++i) {
          if (uniform01(rng_) < cfg_.enemy_noise) {
            const GridPos q = moved(enemies_[i], uniform_index(rng_, 5));
            next[i] = map_.enemy_passable(q) ? q : enemies_[i];
          }
        }
      }
      enemies_ = std::move(next);
      caught = occupied_by_enemy(agent_);
    }
    if (caught) {
      out.events.capture = true;
      agent_ = map_.agent_start();
      enemies_ = map_.enemy_starts();
    }
    out.events.reached_safe_room = map_.is_safe(agent_);
    out.task_reward = out.events.reached_safe_room ? 1.0 : 0.0;
    out.observation = observation();
    return out;
  }

 private:
  static GridPos moved(GridPos p, std::size_t action) {
    switch (action) {
      case 1: return {p.x, p.y - 1};
      case 2: return {p.x, p.y + 1};
      case 3: return {p.x - 1, p.y};
      case 4: return {p.x + 1, p.y};
      default: return p;
    }
  }

  bool occupied_by_enemy(GridPos p) const {
    return std::find(enemies_.begin(), enemies_.end(), p) != enemies_.end();
  }

  CellCode code_at(GridPos p) const {
    if (!map_.inside(p)) return CellCode::out_of_view;
    if (occupied_by_enemy(p)) return CellCode::enemy;
    if (map_.is_open_door(p)) return CellCode::door;
    return map_.agent_passable(p) ? CellCode::empty : CellCode::wall;
  }

  HauntedHouseConfig cfg_;
  HouseMap map_;
  GridPos agent_{};
  std::vector<GridPos> enemies_;
  std::vector<GridPos> doors_;
  Rng rng_{0};
};

}  // namespace smirl::env
