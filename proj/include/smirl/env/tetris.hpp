#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "smirl/core/random.hpp"
#include "smirl/env/environment.hpp"

namespace smirl::env {

struct TetrisConfig {
  int width = 4;
  int height = 10;
  std::size_t max_steps = 100;
};

enum class Tromino : int { I = 0, L = 1 };
inline constexpr int kTrominoCount = 2;
inline constexpr int kOrientations = 4;

struct Cell {
  int x;
  int y;
};
using TrominoCells = std::array<Cell, 3>;

/// Cells of a tromino in its bounding box, y pointing up from the lowest row.
inline TrominoCells tromino_cells(Tromino shape, int orientation) {
  static constexpr std::array<TrominoCells, 4> kI = {{
      {{{0, 0}, {1, 0}, {2, 0}}},
      {{{0, 0}, {0, 1}, {0, 2}}},
      {{{0, 0}, {1, 0}, {2, 0}}},
      {{{0, 0}, {0, 1}, {0, 2}}},
  }};
  static constexpr std::array<TrominoCells, 4> kL = {{
      {{{0, 0}, {1, 0}, {0, 1}}},
      {{{0, 0}, {0, 1}, {1, 1}}},
      {{{0, 1}, {1, 1}, {1, 0}}},
      {{{0, 0}, {1, 0}, {1, 1}}},
  }};
  const int o = orientation & 3;
  return shape == Tromino::I ? kI[o] : kL[o];
}

inline int tromino_width(const TrominoCells& cells) {
  int w = 0;
  for (const auto& c : cells) w = std::max(w, c.x + 1);
  return w;
}

inline int tromino_height(const TrominoCells& cells) {
  int h = 0;
  for (const auto& c : cells) h = std::max(h, c.y + 1);
  return h;
}

/// Tetris with I/L trominoes on a small board.
///
/// Observation: `width*height` board cells (index `y*width + x`, y = 0 is the
/// bottom row) followed by a one-hot of the shape the next action places.
/// Action `a` drops that shape in column `a / 4` with orientation `a % 4`;
/// columns that would push the shape past the right edge are clamped.
/// Filling the top row (or a spawn collision) is a death: the board is
/// cleared and the episode continues. Task reward = rows cleared.
class TetrisEnv final : public Environment {
 public:
  explicit TetrisEnv(TetrisConfig cfg = {}) : cfg_(cfg) {
    require(cfg_.width >= 3 && cfg_.height >= 3, "TetrisEnv: board must be at least 3x3");
    require(cfg_.max_steps >= 1, "TetrisEnv: max_steps must be >= 1");
    board_.assign(static_cast<std::size_t>(cfg_.width * cfg_.height), 0);
  }

  EnvSpec spec() const override {
    return {static_cast<std::size_t>(cfg_.width * cfg_.height + kTrominoCount), ObsKind::binary,
            static_cast<std::size_t>(cfg_.width * kOrientations), cfg_.max_steps};
  }
  std::string name() const override { return "tetris"; }
  std::unique_ptr<Environment> clone() const override { return std::make_unique<TetrisEnv>(*this); }

  const TetrisConfig& config() const { return cfg_; }
  const std::vector<std::uint8_t>& board() const { return board_; }
  Tromino next_shape() const { return next_; }
  bool filled(int x, int y) const { return board_[index(x, y)] != 0; }
  int filled_count() const { return static_cast<int>(std::count(board_.begin(), board_.end(), 1)); }

  /// Test hook: overwrite the board and the pending shape.
  void load_board(const std::vector<std::uint8_t>& board, Tromino next) {
    require_dim(board.size(), board_.size(), "TetrisEnv::load_board");
    board_ = board;
    next_ = next;
  }

  static std::size_t encode_action(int column, int orientation) {
    return static_cast<std::size_t>(column * kOrientations + orientation);
  }

  Observation observation() const {
    Observation obs(spec().obs_dim, 0.0);
    for (std::size_t i = 0; i < board_.size(); ++i) obs[i] = board_[i];
    obs[board_.size() + static_cast<std::size_t>(next_)] = 1.0;
    return obs;
  }

 protected:
  Observation do_reset(std::uint64_t seed) override {
    rng_ = Rng(seed);
    std::fill(board_.begin(), board_.end(), 0);
    next_ = sample_shape();
    return observation();
  }

  StepOutcome do_step(std::size_t action) override {
    StepOutcome out;
    const int column = static_cast<int>(action) / kOrientations;
    const int orientation = static_cast<int>(action) % kOrientations;
    const TrominoCells cells = tromino_cells(next_, orientation);

    if (!drop(cells, column)) {
      // Spawn collision: the stack already reaches the top.
      out.events.death = true;
      std::fill(board_.begin(), board_.end(), 0);
      drop(cells, column);
    }
    out.events.rows_cleared = clear_rows();
    if (top_row_occupied()) {
      out.events.death = true;
      std::fill(board_.begin(), board_.end(), 0);
    }
    out.task_reward = out.events.rows_cleared;
    next_ = sample_shape();
    out.observation = observation();
    return out;
  }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y * cfg_.width + x); }

  bool fits(const TrominoCells& cells, int col, int row) const {
    for (const auto& c : cells) {
      const int x = col + c.x;
      const int y = row + c.y;
      if (x < 0 || x >= cfg_.width || y < 0 || y >= cfg_.height) return false;
      if (board_[index(x, y)]) return false;
    }
    return true;
  }

  // Returns false when the shape collides at its spawn position.
  bool drop(const TrominoCells& cells, int column) {
    const int col = std::clamp(column, 0, cfg_.width - tromino_width(cells));
    int row = cfg_.height - tromino_height(cells);
    if (!fits(cells, col, row)) return false;
    while (row > 0 && fits(cells, col, row - 1)) --row;
    for (const auto& c : cells) board_[index(col + c.x, row + c.y)] = 1;
    return true;
  }

  int clear_rows() {
    int cleared = 0;
    int write = 0;
    for (int y = 0; y < cfg_.height; ++y) {
      bool full = true;
      for (int x = 0; x < cfg_.width; ++x) full = full && board_[index(x, y)];
      if (full) {
        ++cleared;
        continue;
      }
      if (write != y) {
        for (int x = 0; x < cfg_.width; ++x) board_[index(x, write)] = board_[index(x, y)];
      }
      ++write;
    }
    for (int y = write; y < cfg_.height; ++y) {
      for (int x = 0; x < cfg_.width; ++x) board_[index(x, y)] = 0;
    }
    return cleared;
  }

  bool top_row_occupied() const {
    for (int x = 0; x < cfg_.width; ++x) {
      if (board_[index(x, cfg_.height - 1)]) return true;
    }
    return false;
  }

  Tromino sample_shape() { return static_cast<Tromino>(uniform_index(rng_, kTrominoCount)); }

  TetrisConfig cfg_;
  std::vector<std::uint8_t> board_;
  Tromino next_ = Tromino::I;
  Rng rng_{0};
};

}  // namespace smirl::env
