#pragma once

// Battlesnake rules engine: a deterministic, seedable simultaneous-move game.
//
// Frame: origin at the top-left corner, x grows to the right, y grows
// downward. "up" therefore decreases y.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bsnake/common.h"

namespace bsnake {

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

enum class Action : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

inline constexpr int kNumActions = 4;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kUp, Action::kDown, Action::kLeft, Action::kRight};

inline constexpr int index_of(Action a) { return static_cast<int>(a); }
Action action_from_index(int index);
Action opposite(Action a);
Coord step_towards(Coord c, Action a);
std::string_view action_name(Action a);
// Accepts "up", "down", "left", "right".
std::optional<Action> parse_action(std::string_view name);

inline int manhattan(Coord a, Coord b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

inline constexpr int kMaxHealth = 100;

struct SnakeState {
  AgentId id = 0;
  std::vector<Coord> body;  // head first
  int health = kMaxHealth;
  bool alive = true;
  std::optional<Action> facing;

  Coord head() const { return body.front(); }
  int length() const { return static_cast<int>(body.size()); }
  friend bool operator==(const SnakeState&, const SnakeState&) = default;
};

enum class EventKind : int {
  kAteFood = 0,
  kHitWall,
  kHitSelf,
  kHitOtherBody,
  kForbiddenMove,
  kHeadToHeadLoss,
  kHeadToHeadMutual,
  kStarved,
  kKilledOther,
  kSurvivedTurn,
  kWon,
};
inline constexpr int kNumEventKinds = 11;

std::string_view event_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);
// True for the six kinds that remove a snake from the game.
bool is_elimination(EventKind kind);

struct TurnEvent {
  AgentId agent_id = 0;
  EventKind kind = EventKind::kSurvivedTurn;
  friend bool operator==(const TurnEvent&, const TurnEvent&) = default;
};

struct GameConfig {
  int width = 11;
  int height = 11;
  int n_snakes = 5;
  int initial_length = 3;
  double food_spawn_probability = 0.15;
  uint64_t seed = 0;

  // Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

struct BoardState {
  int width = 0;
  int height = 0;
  std::vector<SnakeState> snakes;  // snakes[i].id == i + 1
  std::vector<Coord> food;         // kept sorted, no duplicates
  int turn = 0;
  double food_spawn_probability = 0.15;
  Rng rng;

  bool in_bounds(Coord c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  const SnakeState& snake(AgentId id) const;
  SnakeState& snake(AgentId id);
  bool has_snake(AgentId id) const {
    return id >= 1 && id <= static_cast<int>(snakes.size());
  }
  int num_alive() const;
  std::vector<AgentId> alive_ids() const;
  bool has_food(Coord c) const;

  friend bool operator==(const BoardState&, const BoardState&) = default;
};

using JointAction = std::map<AgentId, Action>;

struct StepResult {
  BoardState board;
  std::vector<TurnEvent> events;
};

struct GameOutcome {
  // Absent for a draw (every snake eliminated).
  std::optional<AgentId> winner;
  bool is_draw() const { return !winner.has_value(); }
  friend bool operator==(const GameOutcome&, const GameOutcome&) = default;
};

// Places n_snakes on distinct boundary cells and one food on a free cell.
BoardState init_game(const GameConfig& config);

// Resolves one simultaneous turn. joint_actions must hold exactly one action
// per living snake.
StepResult step(const BoardState& board, const JointAction& joint_actions);

// In-place variant used by hot loops; returns the events of the turn.
std::vector<TurnEvent> step_in_place(BoardState& board, const JointAction& joint_actions);

std::optional<GameOutcome> is_terminal(const BoardState& board);

// Plain-text rendering: '.' empty, '*' food, digit for a head, letter for a
// body segment (a = snake 1, ...).
std::string render_ascii(const BoardState& board);

}  // namespace bsnake
