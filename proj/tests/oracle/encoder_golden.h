#pragma once

// Hand-enumerated encoder fixture and a supply of boards from random play.

#include <tuple>
#include <vector>

#include "bsnake/engine.h"
#include "test_util.h"

namespace oracle {

using namespace bsnake;
using bsnake::testing::make_board;

// 7x7 board, three snakes, two food:
//
//   y\x 0 1 2 3 4 5 6
//   0   . . . . . . *
//   1   . 1 a a . . .
//   2   . . . a . 3 .
//   3   * . . . . c .
//   4   . 2 b b . c .
//   5   . . . b . . .
//   6   . . . . . . .
inline BoardState golden_fixture() {
  return make_board(7, 7,
                    {{{{1, 1}, {2, 1}, {3, 1}, {3, 2}}, 80, Action::kLeft},
                     {{{1, 4}, {2, 4}, {3, 4}, {3, 5}}, 60, Action::kLeft},
                     {{{5, 2}, {5, 3}, {5, 4}, {5, 4}}, 100, Action::kUp}},
                    {{6, 0}, {0, 3}});
}

// Expected non-zero cells written out by hand as (x, y, channel, value), for
// the observation of snake 1. Everything else is zero.
inline const std::vector<std::tuple<int, int, int, double>> kSnakeOneCells = {
    {6, 0, 0, 1}, {0, 3, 0, 1},
    {1, 1, 1, 5}, {2, 1, 1, 1}, {3, 1, 1, 1}, {3, 2, 1, 1},
    {1, 4, 2, 5}, {2, 4, 2, 1}, {3, 4, 2, 1}, {3, 5, 2, 1},
    {5, 2, 2, 5}, {5, 3, 2, 1}, {5, 4, 2, 1},
};

// Random mid-game boards from real play.
inline std::vector<BoardState> random_boards(int count) {
  std::vector<BoardState> out;
  Rng rng(99);
  uint64_t seed = 0;
  while (static_cast<int>(out.size()) < count) {
    GameConfig cfg;
    cfg.width = 5 + static_cast<int>(rng.uniform(7));
    cfg.height = 5 + static_cast<int>(rng.uniform(7));
    cfg.n_snakes = 2 + static_cast<int>(rng.uniform(3));
    cfg.food_spawn_probability = 0.3;
    cfg.seed = seed++;
    BoardState b = init_game(cfg);
    out.push_back(b);
    while (!is_terminal(b) && static_cast<int>(out.size()) < count) {
      JointAction joint;
      for (auto id : b.alive_ids()) {
        const auto& s = b.snake(id);
        Action a = action_from_index(static_cast<int>(rng.uniform(4)));
        if (s.facing && a == opposite(*s.facing)) a = *s.facing;
        joint[id] = a;
      }
      step_in_place(b, joint);
      out.push_back(b);
    }
  }
  return out;
}

}  // namespace oracle
