#include "bsnake/heuristics.h"

#include <gtest/gtest.h>

#include <queue>
#include <set>

#include "test_util.h"

namespace bsnake {
namespace {

using testing::count_events;
using testing::make_board;
using Valid = std::array<int, 4>;

BoardState single(int w, int h, std::vector<Coord> body, std::optional<Action> facing,
                  int health = 100, std::vector<Coord> food = {}) {
  return make_board(w, h, {{std::move(body), health, facing}}, std::move(food));
}

TEST(Names, RoundTrip) {
  for (Rule r : kAllRules) EXPECT_EQ(parse_rule(rule_name(r)), r);
  for (auto m : {HeuristicMode::kInTrainingMask, HeuristicMode::kAdHocOverwrite,
                 HeuristicMode::kRewardShaping}) {
    EXPECT_EQ(parse_mode(mode_name(m)), m);
  }
  EXPECT_FALSE(parse_rule("rule5").has_value());
  EXPECT_TRUE(rule_properties(Rule::kWalls).prevention);
  EXPECT_FALSE(rule_properties(Rule::kKill).prevention);
  EXPECT_TRUE(rule_properties(Rule::kKill).interacts_agents);
}

TEST(MaskWalls, Geometry) {
  EXPECT_EQ(mask_walls(single(11, 11, {{0, 0}, {0, 1}}, Action::kUp), 1).valid, (Valid{0, 1, 0, 1}));
  EXPECT_EQ(mask_walls(single(11, 11, {{5, 5}, {5, 6}}, Action::kUp), 1).valid, (Valid{1, 1, 1, 1}));
  EXPECT_EQ(mask_walls(single(11, 11, {{10, 5}, {9, 5}}, Action::kRight), 1).valid,
            (Valid{1, 1, 1, 0}));
  EXPECT_FALSE(mask_walls(single(11, 11, {{0, 0}}, std::nullopt), 1).preferred.has_value());
}

TEST(MaskForbidden, OppositeOfFacing) {
  EXPECT_EQ(mask_forbidden(single(7, 7, {{3, 3}, {3, 4}}, Action::kUp), 1).valid,
            (Valid{1, 0, 1, 1}));
  EXPECT_EQ(mask_forbidden(single(7, 7, {{3, 3}, {3, 3}}, std::nullopt), 1).valid,
            (Valid{1, 1, 1, 1}));
  EXPECT_EQ(mask_forbidden(single(7, 7, {{3, 3}, {4, 3}}, Action::kLeft), 1).valid,
            (Valid{1, 1, 1, 0}));
}

TEST(PromoteFood, TriggerAndAdjacentFood) {
  auto b = single(7, 7, {{3, 3}, {3, 4}, {3, 5}}, Action::kUp, 10, {{2, 3}});
  const RuleMask m = promote_food(b, 1, 30);
  EXPECT_EQ(m.preferred, Action::kLeft);
  EXPECT_TRUE(m.all_valid());
  b.snakes[0].health = 90;
  EXPECT_FALSE(promote_food(b, 1, 30).preferred.has_value());
  b.snakes[0].health = 30;
  EXPECT_FALSE(promote_food(b, 1, 30).preferred.has_value());
}

TEST(PromoteFood, UnreachableFood) {
  // Food sealed in the corner by the agent's own body.
  auto b = single(5, 5, {{2, 0}, {1, 0}, {1, 1}, {0, 1}}, Action::kRight, 5, {{0, 0}});
  EXPECT_FALSE(promote_food(b, 1, 30).preferred.has_value());
}

// Independent oracle: for each action in index order, a fresh single-source
// BFS from the stepped-to cell; the first action reaching the nearest food
// wins.
std::optional<Action> food_oracle(const BoardState& b, AgentId id) {
  std::set<Coord> blocked;
  for (const auto& s : b.snakes)
    if (s.alive) blocked.insert(s.body.begin(), s.body.end());
  std::set<Coord> food(b.food.begin(), b.food.end());
  std::optional<Action> best;
  int best_d = 1 << 30;
  for (Action a : kAllActions) {
    const Coord start = step_towards(b.snake(id).head(), a);
    if (!b.in_bounds(start) || blocked.contains(start)) continue;
    std::map<Coord, int> dist{{start, 0}};
    std::queue<Coord> q;
    q.push(start);
    int found = -1;
    while (!q.empty()) {
      Coord c = q.front();
      q.pop();
      if (food.contains(c)) {
        found = dist[c];
        break;
      }
      for (Action d : kAllActions) {
        Coord n = step_towards(c, d);
        if (b.in_bounds(n) && !blocked.contains(n) && !dist.contains(n)) {
          dist[n] = dist[c] + 1;
          q.push(n);
        }
      }
    }
    if (found >= 0 && found < best_d) {
      best_d = found;
      best = a;
    }
  }
  return best;
}

TEST(PromoteFood, DetourAroundBodyWallMatchesOracle) {
  // Agent at (1,3) with food at (5,3); snake 2 forms a vertical wall at x=3
  // from y=0 to y=5, leaving the way round through y=6.
  BoardState b = make_board(7, 7,
                            {{{{1, 3}, {1, 4}, {1, 5}}, 5, Action::kUp},
                             {{{3, 0}, {3, 1}, {3, 2}, {3, 3}, {3, 4}, {3, 5}}, 100, Action::kUp}},
                            {{5, 3}});
  const auto expected = food_oracle(b, 1);
  ASSERT_TRUE(expected.has_value());
  EXPECT_EQ(promote_food(b, 1, 30).preferred, expected);
}

std::vector<BoardState> random_boards(int count, uint64_t seed) {
  std::vector<BoardState> out;
  Rng rng(seed);
  uint64_t game = 0;
  while (static_cast<int>(out.size()) < count) {
    GameConfig cfg;
    cfg.width = 5 + static_cast<int>(rng.uniform(4));
    cfg.height = 5 + static_cast<int>(rng.uniform(4));
    cfg.n_snakes = 2 + static_cast<int>(rng.uniform(3));
    cfg.food_spawn_probability = 0.4;
    cfg.seed = seed * 1000 + game++;
    BoardState b = init_game(cfg);
    while (!is_terminal(b) && static_cast<int>(out.size()) < count) {
      JointAction joint;
      for (auto id : b.alive_ids()) {
        const RuleMask m = mask_walls(b, id);
        std::vector<Action> ok;
        for (Action a : kAllActions) {
          const auto& s = b.snake(id);
          if (m.is_valid(a) && !(s.facing && a == opposite(*s.facing))) ok.push_back(a);
        }
        joint[id] = ok[rng.uniform(ok.size())];
      }
      step_in_place(b, joint);
      // Random health so the food rule fires often.
      for (auto& s : b.snakes) s.health = 1 + static_cast<int>(rng.uniform(100));
      out.push_back(b);
    }
  }
  return out;
}

TEST(PromoteFood, RandomBoardsMatchOracle) {
  int fired = 0;
  for (const BoardState& b : random_boards(5000, 1)) {
    for (auto id : b.alive_ids()) {
      const auto got = promote_food(b, id, 30);
      const auto expected = b.snake(id).health < 30 ? food_oracle(b, id) : std::nullopt;
      ASSERT_EQ(got.preferred, expected);
      ASSERT_TRUE(got.all_valid());
      fired += got.preferred ? 1 : 0;
    }
  }
  EXPECT_GT(fired, 100);
}

TEST(PromoteKill, Trigger) {
  BoardState b = make_board(9, 9,
                            {{{{2, 4}, {1, 4}, {0, 4}, {0, 5}, {0, 6}}, 100, Action::kRight},
                             {{{4, 4}, {5, 4}, {6, 4}}, 100, Action::kLeft}});
  EXPECT_EQ(promote_kill(b, 1).preferred, Action::kRight);
  EXPECT_FALSE(promote_kill(b, 2).preferred.has_value());
  BoardState even = make_board(9, 9,
                               {{{{2, 4}, {1, 4}, {0, 4}}, 100, Action::kRight},
                                {{{4, 4}, {5, 4}, {6, 4}}, 100, Action::kLeft}});
  EXPECT_FALSE(promote_kill(even, 1).preferred.has_value());
  EXPECT_FALSE(promote_kill(even, 2).preferred.has_value());
}

TEST(PromoteKill, DiagonalTargetTieBreak) {
  // Enemy head one step down-right: both down and right reach a neighbour
  // of it; down has the lower index.
  BoardState b = make_board(9, 9,
                            {{{{4, 4}, {4, 3}, {4, 2}, {4, 1}}, 100, Action::kDown},
                             {{{5, 5}, {6, 5}, {7, 5}}, 100, Action::kLeft}});
  EXPECT_EQ(promote_kill(b, 1).preferred, Action::kDown);
}

TEST(PromoteKill, BruteForceOverRandomBoards) {
  int fired = 0;
  for (const BoardState& b : random_boards(5000, 2)) {
    for (auto id : b.alive_ids()) {
      const SnakeState& self = b.snake(id);
      const auto got = promote_kill(b, id);
      // Brute force: the lowest-index action whose target is in bounds and
      // adjacent to the head of a strictly shorter enemy two cells away.
      std::optional<Action> expected;
      for (Action a : kAllActions) {
        const Coord n = step_towards(self.head(), a);
        bool ok = false;
        for (const auto& e : b.snakes) {
          if (e.id == id || !e.alive || e.length() >= self.length()) continue;
          const int dx = std::abs(e.head().x - self.head().x);
          const int dy = std::abs(e.head().y - self.head().y);
          const int nx = std::abs(e.head().x - n.x);
          const int ny = std::abs(e.head().y - n.y);
          ok = ok || (dx + dy == 2 && nx + ny == 1);
        }
        if (ok && b.in_bounds(n)) {
          expected = a;
          break;
        }
      }
      ASSERT_EQ(got.preferred, expected);
      fired += got.preferred ? 1 : 0;
    }
  }
  EXPECT_GT(fired, 20);
}

TEST(CombineMasks, AndAndPreferredPrecedence) {
  RuleMask walls{{0, 1, 1, 1}, std::nullopt};
  RuleMask forbidden{{1, 0, 1, 1}, std::nullopt};
  std::vector<RuleMask> both = {walls, forbidden};
  EXPECT_EQ(combine_masks(both).valid, (Valid{0, 0, 1, 1}));
  std::vector<RuleMask> one = {walls};
  EXPECT_EQ(combine_masks(one), walls);
  RuleMask up{{1, 1, 1, 1}, Action::kUp};
  RuleMask right{{1, 1, 1, 1}, Action::kRight};
  std::vector<RuleMask> dropped = {up, walls};
  EXPECT_FALSE(combine_masks(dropped).preferred.has_value());
  std::vector<RuleMask> second = {up, walls, right};
  EXPECT_EQ(combine_masks(second).preferred, Action::kRight);
  EXPECT_THROW(combine_masks(std::span<const RuleMask>{}), ContractViolation);
}

TEST(CombineMasks, AssociativeAndCommutativeOnValid) {
  Rng rng(5);
  auto random_mask = [&] {
    RuleMask m;
    for (int& v : m.valid) v = static_cast<int>(rng.uniform(2));
    return m;
  };
  for (int i = 0; i < 1000; ++i) {
    RuleMask a = random_mask(), b = random_mask(), c = random_mask();
    std::vector<RuleMask> ab = {a, b}, ba = {b, a};
    EXPECT_EQ(combine_masks(ab).valid, combine_masks(ba).valid);
    std::vector<RuleMask> ab_c = {combine_masks(ab), c};
    std::vector<RuleMask> bc = {b, c};
    std::vector<RuleMask> a_bc = {a, combine_masks(bc)};
    EXPECT_EQ(combine_masks(ab_c).valid, combine_masks(a_bc).valid);
  }
}

TEST(ApplyMask, Examples) {
  const ActionProbs half = apply_mask({0.25, 0.25, 0.25, 0.25}, {{1, 1, 0, 0}, std::nullopt});
  EXPECT_EQ(half, (ActionProbs{0.5, 0.5, 0, 0}));
  const ActionProbs in = {0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(apply_mask(in, {}), in);
  const ActionProbs third = apply_mask({0.7, 0.1, 0.1, 0.1}, {{0, 1, 1, 1}, std::nullopt});
  EXPECT_EQ(third[0], 0.0);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(third[i], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(apply_mask(in, {{0, 0, 0, 0}, std::nullopt}), in);
  // No mass left on valid actions: spread evenly.
  const ActionProbs even = apply_mask({1, 0, 0, 0}, {{0, 1, 0, 1}, std::nullopt});
  EXPECT_EQ(even, (ActionProbs{0, 0.5, 0, 0.5}));
}

TEST(ApplyMask, SumsToOneWithExactZeros) {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    ActionProbs p;
    double total = 0;
    for (double& v : p) total += (v = rng.uniform01());
    for (double& v : p) v /= total;
    RuleMask m;
    for (int& v : m.valid) v = static_cast<int>(rng.uniform(2));
    const ActionProbs out = apply_mask(p, m);
    if (m.none_valid()) {
      EXPECT_EQ(out, p);
      continue;
    }
    double sum = 0;
    for (int k = 0; k < 4; ++k) {
      if (!m.valid[k]) EXPECT_EQ(out[k], 0.0);
      sum += out[k];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

HeuristicConfig overwrite_config(std::initializer_list<Rule> rules) {
  HeuristicConfig cfg;
  for (Rule r : rules) cfg.rules[r] = HeuristicMode::kAdHocOverwrite;
  return cfg;
}

TEST(OverwriteAction, Examples) {
  auto b = single(7, 7, {{3, 3}, {3, 4}, {3, 5}}, Action::kUp, 100);
  EXPECT_NE(overwrite_action(Action::kDown, b, 1, overwrite_config({Rule::kForbidden})),
            Action::kDown);
  EXPECT_EQ(overwrite_action(Action::kDown, b, 1, HeuristicConfig{}), Action::kDown);
  auto hungry = single(7, 7, {{3, 3}, {3, 4}, {3, 5}}, Action::kUp, 5, {{2, 3}});
  EXPECT_EQ(overwrite_action(Action::kUp, hungry, 1, overwrite_config({Rule::kFood})),
            food_oracle(hungry, 1));
  EXPECT_EQ(overwrite_action(Action::kUp, hungry, 1, overwrite_config({Rule::kFood})),
            Action::kLeft);
}

TEST(OverwriteAction, FallsBackToMostLikelyValidAction) {
  auto b = single(7, 7, {{0, 3}, {1, 3}, {2, 3}}, Action::kLeft);
  const auto cfg = overwrite_config({Rule::kWalls, Rule::kForbidden});
  EXPECT_EQ(overwrite_action(Action::kLeft, b, 1, cfg, ActionProbs{0.1, 0.3, 0.5, 0.1}),
            Action::kDown);
  EXPECT_EQ(overwrite_action(Action::kUp, b, 1, cfg, ActionProbs{0.1, 0.3, 0.5, 0.1}), Action::kUp);
}

TEST(OverwriteAction, IgnoresRulesInOtherModes) {
  auto b = single(7, 7, {{3, 3}, {3, 4}, {3, 5}}, Action::kUp);
  HeuristicConfig cfg;
  cfg.rules[Rule::kForbidden] = HeuristicMode::kInTrainingMask;
  EXPECT_EQ(overwrite_action(Action::kDown, b, 1, cfg), Action::kDown);
}

TEST(OverwriteAction, NeverReturnsPreventedActionUnlessAllMasked) {
  const auto cfg = overwrite_config({Rule::kWalls, Rule::kForbidden, Rule::kFood, Rule::kKill});
  Rng rng(4);
  for (const BoardState& b : random_boards(3000, 3)) {
    for (auto id : b.alive_ids()) {
      const Action policy = action_from_index(static_cast<int>(rng.uniform(4)));
      const Action out = overwrite_action(policy, b, id, cfg);
      std::vector<RuleMask> prevent = {mask_walls(b, id), mask_forbidden(b, id)};
      const RuleMask m = combine_masks(prevent);
      if (!m.none_valid()) ASSERT_TRUE(m.is_valid(out));
    }
  }
}

TEST(Schedule, WeightLookup) {
  HeuristicConfig cfg;
  cfg.rules[Rule::kWalls] = HeuristicMode::kInTrainingMask;
  cfg.schedule[100] = {{Rule::kWalls, 0.5}};
  cfg.schedule[200] = {{Rule::kWalls, 0.0}};
  EXPECT_EQ(cfg.weight(Rule::kWalls, 0), 1.0);
  EXPECT_EQ(cfg.weight(Rule::kWalls, 150), 0.5);
  EXPECT_EQ(cfg.weight(Rule::kWalls, 200), 0.0);
  EXPECT_EQ(cfg.weight(Rule::kWalls, kInferenceStep), 0.0);
  EXPECT_EQ(cfg.weight(Rule::kFood, 150), 1.0);
}

TEST(Schedule, ScaleMaskThreshold) {
  const RuleMask m{{0, 1, 1, 1}, Action::kDown};
  EXPECT_EQ(scale_mask(m, 1.0), m);
  EXPECT_EQ(scale_mask(m, 0.6), m);
  // At exactly 0.5 the masked entry reaches the threshold and is kept.
  EXPECT_EQ(scale_mask(m, 0.5), RuleMask{});
  EXPECT_EQ(scale_mask(m, 0.0), RuleMask{});
}

TEST(Schedule, ZeroWeightEqualsDisabled) {
  HeuristicConfig on;
  on.rules = {{Rule::kWalls, HeuristicMode::kInTrainingMask},
              {Rule::kForbidden, HeuristicMode::kAdHocOverwrite},
              {Rule::kFood, HeuristicMode::kAdHocOverwrite},
              {Rule::kKill, HeuristicMode::kRewardShaping}};
  for (Rule dropped : kAllRules) {
    HeuristicConfig zero = on;
    zero.schedule[0] = {{dropped, 0.0}};
    HeuristicConfig off = on;
    off.rules.erase(dropped);
    EXPECT_EQ(shaping_terms(zero, 10), shaping_terms(off, 10));
    for (const BoardState& b : random_boards(300, 4)) {
      for (auto id : b.alive_ids()) {
        for (auto mode : {HeuristicMode::kInTrainingMask, HeuristicMode::kAdHocOverwrite}) {
          ASSERT_EQ(combined_mask(b, id, zero, mode, 10), combined_mask(b, id, off, mode, 10));
        }
        for (Action a : kAllActions) {
          ASSERT_EQ(overwrite_action(a, b, id, zero), overwrite_action(a, b, id, off));
        }
      }
    }
  }
}

TEST(Shaping, TermsPerRule) {
  HeuristicConfig cfg;
  cfg.rules = {{Rule::kWalls, HeuristicMode::kRewardShaping},
               {Rule::kForbidden, HeuristicMode::kRewardShaping},
               {Rule::kFood, HeuristicMode::kRewardShaping},
               {Rule::kKill, HeuristicMode::kRewardShaping}};
  const auto terms = shaping_terms(cfg);
  EXPECT_EQ(terms.at(EventKind::kHitWall), -0.4);
  EXPECT_EQ(terms.at(EventKind::kForbiddenMove), -0.4);
  EXPECT_EQ(terms.at(EventKind::kAteFood), 0.4);
  EXPECT_EQ(terms.at(EventKind::kKilledOther), 0.4);
  cfg.schedule[0] = {{Rule::kWalls, 0.5}};
  EXPECT_EQ(shaping_terms(cfg).at(EventKind::kHitWall), -0.2);

  RewardConfig base;
  base.shaping_terms[EventKind::kHitWall] = -0.1;
  const RewardConfig merged = with_heuristic_shaping(base, cfg);
  EXPECT_DOUBLE_EQ(merged.shaping_terms.at(EventKind::kHitWall), -0.3);
  // Hitting a wall with the full penalty.
  HeuristicConfig walls;
  walls.rules[Rule::kWalls] = HeuristicMode::kRewardShaping;
  const std::vector<TurnEvent> hit = {{1, EventKind::kHitWall}};
  EXPECT_DOUBLE_EQ(total_reward(hit, 1, with_heuristic_shaping(RewardConfig{}, walls)), -1.4);
}

TEST(HeuristicConfig, Validation) {
  HeuristicConfig cfg;
  cfg.health_threshold = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.health_threshold = 101;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.health_threshold = 30;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rules[Rule::kFood] = HeuristicMode::kInTrainingMask;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.rules[Rule::kFood] = HeuristicMode::kAdHocOverwrite;
  cfg.schedule[5] = {{Rule::kFood, 1.5}};
  EXPECT_THROW(cfg.validate(), ConfigError);
}

// Agents that sample from a uniformly random policy passed through the
// walls + forbidden training mask never produce the two prevented events.
TEST(InTrainingMask, NoWallOrForbiddenEventsOverManyEpisodes) {
  HeuristicConfig cfg;
  cfg.rules = {{Rule::kWalls, HeuristicMode::kInTrainingMask},
               {Rule::kForbidden, HeuristicMode::kInTrainingMask}};
  Rng rng(12);
  int prevented = 0;
  for (int episode = 0; episode < 1000; ++episode) {
    GameConfig gc;
    gc.width = 7;
    gc.height = 7;
    gc.n_snakes = 3;
    gc.seed = episode;
    BoardState b = init_game(gc);
    while (!is_terminal(b) && b.turn < 500) {
      JointAction joint;
      for (auto id : b.alive_ids()) {
        const ActionProbs p = apply_mask({0.25, 0.25, 0.25, 0.25},
                                         combined_mask(b, id, cfg, HeuristicMode::kInTrainingMask));
        double u = rng.uniform01();
        int k = 0;
        while (k < 3 && u >= p[k]) u -= p[k++];
        while (p[k] == 0.0) --k;
        joint[id] = action_from_index(k);
      }
      const auto events = step_in_place(b, joint);
      for (const auto& s : b.snakes) {
        prevented += count_events(events, s.id, EventKind::kHitWall);
        prevented += count_events(events, s.id, EventKind::kForbiddenMove);
      }
    }
  }
  EXPECT_EQ(prevented, 0);
}

}  // namespace
}  // namespace bsnake
