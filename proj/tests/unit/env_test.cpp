#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "smirl/env/haunted_house.hpp"
#include "smirl/env/micro_cmp_env.hpp"
#include "smirl/env/tetris.hpp"
#include "smirl/env/windy_platform.hpp"

using namespace smirl;
using namespace smirl::env;

namespace {

std::vector<std::uint8_t> empty_board() { return std::vector<std::uint8_t>(40, 0); }

void set(std::vector<std::uint8_t>& b, int x, int y) { b[static_cast<std::size_t>(y * 4 + x)] = 1; }

}  // namespace

TEST(Tetris, SpecShape) {
  TetrisEnv env;
  const auto s = env.spec();
  EXPECT_EQ(s.obs_dim, 42u);
  EXPECT_EQ(s.action_count, 16u);
  EXPECT_EQ(s.max_steps, 100u);
  EXPECT_EQ(s.obs_kind, ObsKind::binary);
}

TEST(Tetris, ResetIsEmptyWithOneHotShape) {
  TetrisEnv env;
  const auto obs = env.reset(1);
  ASSERT_EQ(obs.size(), 42u);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(obs[i], 0.0);
  EXPECT_EQ(obs[40] + obs[41], 1.0);
}

TEST(Tetris, FlatIDropsToFloor) {
  TetrisEnv env;
  env.reset(2);
  env.load_board(empty_board(), Tromino::I);
  const auto out = env.step(TetrisEnv::encode_action(0, 0));
  EXPECT_TRUE(env.filled(0, 0));
  EXPECT_TRUE(env.filled(1, 0));
  EXPECT_TRUE(env.filled(2, 0));
  EXPECT_FALSE(env.filled(3, 0));
  EXPECT_EQ(env.filled_count(), 3);
  EXPECT_EQ(out.task_reward, 0.0);
  EXPECT_FALSE(out.events.death);
  // Board cell (x, y) sits at index y*4 + x.
  EXPECT_EQ(out.observation[0], 1.0);
  EXPECT_EQ(out.observation[3], 0.0);
}

TEST(Tetris, CompletingRowClearsItAndPaysOne) {
  TetrisEnv env;
  env.reset(3);
  auto b = empty_board();
  set(b, 3, 0);
  set(b, 3, 1);
  env.load_board(b, Tromino::I);
  const auto out = env.step(TetrisEnv::encode_action(0, 0));
  EXPECT_EQ(out.events.rows_cleared, 1);
  EXPECT_EQ(out.task_reward, 1.0);
  // The cell above the cleared row falls down one row.
  EXPECT_TRUE(env.filled(3, 0));
  EXPECT_EQ(env.filled_count(), 1);
}

TEST(Tetris, ColumnIsClampedAtRightEdge) {
  TetrisEnv env;
  env.reset(4);
  env.load_board(empty_board(), Tromino::I);
  env.step(TetrisEnv::encode_action(3, 0));
  EXPECT_FALSE(env.filled(0, 0));
  EXPECT_TRUE(env.filled(1, 0));
  EXPECT_TRUE(env.filled(3, 0));
}

TEST(Tetris, VerticalIStacksInColumn) {
  TetrisEnv env;
  env.reset(5);
  env.load_board(empty_board(), Tromino::I);
  env.step(TetrisEnv::encode_action(2, 1));
  EXPECT_TRUE(env.filled(2, 0));
  EXPECT_TRUE(env.filled(2, 1));
  EXPECT_TRUE(env.filled(2, 2));
  EXPECT_EQ(env.filled_count(), 3);
}

TEST(Tetris, LRestsOnOverhangLeavingHole) {
  TetrisEnv env;
  env.reset(6);
  auto b = empty_board();
  set(b, 0, 0);
  env.load_board(b, Tromino::L);
  env.step(TetrisEnv::encode_action(0, 0));
  // Cells {(0,0),(1,0),(0,1)} of the L land one row up.
  EXPECT_TRUE(env.filled(0, 1));
  EXPECT_TRUE(env.filled(1, 1));
  EXPECT_TRUE(env.filled(0, 2));
  EXPECT_FALSE(env.filled(1, 0));
  EXPECT_EQ(env.filled_count(), 4);
}

TEST(Tetris, ReachingTopRowIsDeathAndClearsBoard) {
  TetrisEnv env;
  env.reset(7);
  auto b = empty_board();
  for (int y = 0; y < 7; ++y) set(b, 0, y);
  env.load_board(b, Tromino::I);
  const auto out = env.step(TetrisEnv::encode_action(0, 1));
  EXPECT_TRUE(out.events.death);
  EXPECT_EQ(env.filled_count(), 0);
  EXPECT_FALSE(out.terminal);
}

TEST(Tetris, SpawnCollisionIsDeath) {
  TetrisEnv env;
  env.reset(8);
  auto b = empty_board();
  for (int y = 0; y < 9; ++y) set(b, 0, y);
  env.load_board(b, Tromino::I);
  const auto out = env.step(TetrisEnv::encode_action(0, 1));
  EXPECT_TRUE(out.events.death);
  EXPECT_LE(env.filled_count(), 3);
}

TEST(Tetris, CellConservationUnderRandomPlay) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TetrisEnv env;
    env.reset(seed);
    Rng rng(seed + 100);
    for (std::size_t t = 0; t < 100; ++t) {
      const int before = env.filled_count();
      const auto out = env.step(uniform_index(rng, 16));
      if (out.events.death) continue;
      EXPECT_EQ(env.filled_count(), before + 3 - 4 * out.events.rows_cleared);
    }
  }
}

TEST(Environment, FixedHorizonContract) {
  TetrisEnv env(TetrisConfig{4, 10, 5});
  EXPECT_THROW(env.step(0), ContractError);
  env.reset(1);
  EXPECT_THROW(env.step(16), ContractError);
  for (int t = 0; t < 5; ++t) {
    const auto out = env.step(0);
    EXPECT_EQ(out.terminal, t == 4);
  }
  EXPECT_THROW(env.step(0), ContractError);
  env.reset(2);
  EXPECT_NO_THROW(env.step(0));
}

TEST(Environment, SameSeedSameTrajectory) {
  auto roll = [](Environment& env, std::uint64_t seed) {
    std::vector<Observation> obs{env.reset(seed)};
    for (std::size_t t = 0; t < env.spec().max_steps; ++t) obs.push_back(env.step(t % env.spec().action_count).observation);
    return obs;
  };
  TetrisEnv t1, t2;
  EXPECT_EQ(roll(t1, 9), roll(t2, 9));
  HauntedHouseEnv h1(haunted_house_mini()), h2(haunted_house_mini());
  EXPECT_EQ(roll(h1, 9), roll(h2, 9));
  WindyPlatformEnv w1, w2;
  EXPECT_EQ(roll(w1, 9), roll(w2, 9));
  // A cloned environment continues identically.
  TetrisEnv a;
  a.reset(11);
  a.step(3);
  auto b = a.clone();
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.step(5).observation, b->step(5).observation);
}

TEST(HauntedHouse, SafeRoomReachableOnEveryReset) {
  for (const auto& cfg : {HauntedHouseConfig{}, haunted_house_mini()}) {
    HauntedHouseEnv env(cfg);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      env.reset(seed);
      ASSERT_TRUE(env.map().safe_room_reachable(env.agent())) << "seed " << seed;
      ASSERT_EQ(env.open_doors().size(), 1u);
    }
  }
}

TEST(HauntedHouse, DoorPlacementVaries) {
  HauntedHouseEnv env;
  std::set<int> rows;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    env.reset(seed);
    rows.insert(env.open_doors().front().y);
  }
  EXPECT_EQ(rows.size(), 3u);
}

TEST(HauntedHouse, GreedyPursuitPrefersX) {
  const HouseMap map(HauntedHouseConfig{}.layout);
  EXPECT_EQ(greedy_enemy_move(map, {1, 1}, {5, 1}), (GridPos{2, 1}));
  EXPECT_EQ(greedy_enemy_move(map, {1, 1}, {1, 3}), (GridPos{1, 2}));
  EXPECT_EQ(greedy_enemy_move(map, {1, 1}, {3, 3}), (GridPos{2, 1}));
}

TEST(HauntedHouse, GreedyPursuitFallsBackToY) {
  const HouseMap map(HauntedHouseConfig{}.layout);
  // (2, 2) is wall, so the enemy moves along y instead.
  EXPECT_EQ(greedy_enemy_move(map, {1, 2}, {3, 1}), (GridPos{1, 1}));
}

TEST(HauntedHouse, EnemiesNeverEnterDoorsOrSafeRoom) {
  HouseMap map(HauntedHouseConfig{}.layout);
  map.set_open_doors({{6, 3}});
  EXPECT_EQ(greedy_enemy_move(map, {5, 3}, {8, 3}), (GridPos{5, 3}));
  EXPECT_FALSE(map.enemy_passable({6, 3}));
  EXPECT_TRUE(map.agent_passable({6, 3}));
  EXPECT_FALSE(map.agent_passable({6, 2}));
  EXPECT_FALSE(map.enemy_passable({7, 3}));
}

TEST(HauntedHouse, CaptureSendsEveryoneHome) {
  HauntedHouseConfig cfg;
  cfg.layout = {"#######", "#AE.dS#", "#######"};
  cfg.view_radius = 1;
  HauntedHouseEnv env(cfg);
  env.reset(0);
  const auto out = env.step(HauntedHouseEnv::kStay);
  EXPECT_TRUE(out.events.capture);
  EXPECT_EQ(env.agent(), (GridPos{1, 1}));
  EXPECT_EQ(env.enemies().front(), (GridPos{2, 1}));
  EXPECT_EQ(out.task_reward, 0.0);
}

TEST(HauntedHouse, SafeRoomPaysOne) {
  HauntedHouseConfig cfg;
  cfg.layout = {"#####", "#AdS#", "#####"};
  cfg.view_radius = 1;
  HauntedHouseEnv env(cfg);
  env.reset(0);
  auto out = env.step(4);
  EXPECT_EQ(env.agent(), (GridPos{2, 1}));
  EXPECT_EQ(out.task_reward, 0.0);
  out = env.step(4);
  EXPECT_TRUE(out.events.reached_safe_room);
  EXPECT_EQ(out.task_reward, 1.0);
  out = env.step(4);
  EXPECT_EQ(env.agent(), (GridPos{3, 1}));
  EXPECT_EQ(out.task_reward, 1.0);
}

TEST(HauntedHouse, ObservationIsOneHotWindow) {
  HauntedHouseEnv env;
  const auto obs = env.reset(0);
  ASSERT_EQ(obs.size(), 25u * kCellCodes);
  for (std::size_t k = 0; k < 25; ++k) {
    double sum = 0.0;
    for (int c = 0; c < kCellCodes; ++c) sum += obs[k * kCellCodes + static_cast<std::size_t>(c)];
    EXPECT_EQ(sum, 1.0);
  }
  // Agent at (1, 3): two cells to the left is off the map, one to the left is wall,
  // the centre is empty floor.
  const std::size_t left2 = 2 * 5 + 0, left1 = 2 * 5 + 1, centre = 2 * 5 + 2;
  EXPECT_EQ(obs[left2 * kCellCodes + static_cast<int>(CellCode::out_of_view)], 1.0);
  EXPECT_EQ(obs[left1 * kCellCodes + static_cast<int>(CellCode::wall)], 1.0);
  EXPECT_EQ(obs[centre * kCellCodes + static_cast<int>(CellCode::empty)], 1.0);
}

TEST(HauntedHouse, MiniPresetLayout) {
  const auto cfg = haunted_house_mini();
  HauntedHouseEnv env(cfg);
  EXPECT_EQ(env.spec().obs_dim, 9u * kCellCodes);
  EXPECT_EQ(env.spec().action_count, 5u);
  EXPECT_EQ(env.spec().max_steps, 48u);
  EXPECT_EQ(env.map().agent_start(), (GridPos{3, 3}));
  EXPECT_EQ(env.map().enemy_starts().size(), 4u);
  ASSERT_EQ(env.map().door_candidates().size(), 1u);
  EXPECT_EQ(env.map().door_candidates().front(), (GridPos{4, 3}));
  for (int y = 1; y <= 5; ++y) EXPECT_TRUE(env.map().is_safe({5, y}));
  // Two steps right from the start reach the safe column.
  env.reset(0);
  env.step(4);
  const auto out = env.step(4);
  EXPECT_TRUE(out.events.reached_safe_room);
}

TEST(HauntedHouse, RejectsBadLayout) {
  HauntedHouseConfig cfg;
  cfg.layout = {"#####", "#A.S#", "#####"};
  EXPECT_THROW(HauntedHouseEnv{cfg}, ContractError);
  cfg.layout = {"#####", "#AdX#", "#####"};
  EXPECT_THROW(HauntedHouseEnv{cfg}, ContractError);
}

TEST(WindyPlatform, ResetAtCentreAtRest) {
  WindyPlatformEnv env;
  const auto obs = env.reset(3);
  EXPECT_EQ(obs, (Observation{5.0, 0.0}));
  EXPECT_FALSE(env.fallen());
}

TEST(WindyPlatform, EulerStepWithoutWind) {
  WindyPlatformConfig cfg;
  cfg.wind_std = 0.0;
  WindyPlatformEnv env(cfg);
  env.reset(0);
  auto out = env.step(2);
  EXPECT_NEAR(out.observation[0], 5.0, 1e-15);
  EXPECT_NEAR(out.observation[1], 0.05, 1e-15);
  out = env.step(2);
  EXPECT_NEAR(out.observation[0], 5.0025, 1e-15);
  EXPECT_NEAR(out.observation[1], 0.0975, 1e-15);
  EXPECT_NEAR(out.task_reward, std::exp(-1.5 * 0.9025 * 0.9025), 1e-15);
}

TEST(WindyPlatform, BeltMovesAgentAtRest) {
  WindyPlatformConfig cfg;
  cfg.wind_std = 0.0;
  cfg.belt_velocity = -1.0;
  WindyPlatformEnv env(cfg);
  env.reset(0);
  const auto out = env.step(WindyPlatformEnv::kHold);
  EXPECT_NEAR(out.observation[0], 5.0 - 0.05, 1e-15);
  EXPECT_EQ(out.observation[1], 0.0);
}

TEST(WindyPlatform, WalkReward) {
  EXPECT_EQ(WindyPlatformEnv::walk_reward(1.0, 1.0), 1.0);
  EXPECT_NEAR(WindyPlatformEnv::walk_reward(0.0, 1.0), std::exp(-1.5), 1e-15);
  EXPECT_LT(WindyPlatformEnv::walk_reward(3.0, 1.0), WindyPlatformEnv::walk_reward(2.0, 1.0));
}

TEST(WindyPlatform, FallIsAbsorbing) {
  WindyPlatformConfig cfg;
  cfg.wind_std = 0.0;
  WindyPlatformEnv env(cfg);
  env.reset(0);
  env.set_state(0.01, -1.0);
  auto out = env.step(WindyPlatformEnv::kHold);
  EXPECT_TRUE(out.events.fall);
  for (int t = 0; t < 50; ++t) {
    out = env.step(2);
    EXPECT_TRUE(out.events.fall);
  }
  env.reset(1);
  EXPECT_FALSE(env.fallen());
}

TEST(WindyPlatform, FallFlagMonotoneUnderRandomPlay) {
  WindyPlatformConfig cfg;
  cfg.wind_std = 3.0;
  cfg.length = 1.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    WindyPlatformEnv env(cfg);
    env.reset(seed);
    Rng rng(seed);
    bool fallen = false;
    for (std::size_t t = 0; t < cfg.max_steps; ++t) {
      const auto out = env.step(uniform_index(rng, 3));
      if (fallen) EXPECT_TRUE(out.events.fall);
      fallen = out.events.fall;
    }
  }
}

TEST(MicroCmpEnv, OneHotObservationsAndSampling) {
  MicroCmpEnv env(oracle::two_state_stay_fixture());
  EXPECT_EQ(env.spec().obs_dim, 2u);
  EXPECT_EQ(env.spec().max_steps, 4u);
  std::size_t ones = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto obs = env.reset(seed);
    EXPECT_EQ(obs, (Observation{1.0, 0.0}));
    EXPECT_EQ(env.step(0).observation, (Observation{1.0, 0.0}));
    const auto out = env.step(1);
    ones += env.state();
    ++total;
    EXPECT_EQ(out.observation[env.state()], 1.0);
  }
  // Binomial(2000, 0.5): 5 standard deviations is about 112.
  EXPECT_NEAR(static_cast<double>(ones), 1000.0, 112.0);
}

TEST(MicroCmpEnv, DeterministicChain) {
  MicroCmpEnv env(oracle::chain_fixture());
  env.reset(0);
  std::vector<std::size_t> states;
  for (int t = 0; t < 4; ++t) {
    env.step(0);
    states.push_back(env.state());
  }
  EXPECT_EQ(states, (std::vector<std::size_t>{1, 2, 2, 2}));
}
