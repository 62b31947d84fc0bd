#include "bsnake/engine.h"

#include <algorithm>
#include <sstream>

namespace bsnake {

Action action_from_index(int index) {
  if (index < 0 || index >= kNumActions) {
    throw ContractViolation("action index out of range: " + std::to_string(index));
  }
  return static_cast<Action>(index);
}

Action opposite(Action a) {
  switch (a) {
    case Action::kUp: return Action::kDown;
    case Action::kDown: return Action::kUp;
    case Action::kLeft: return Action::kRight;
    case Action::kRight: return Action::kLeft;
  }
  return a;
}

Coord step_towards(Coord c, Action a) {
  switch (a) {
    case Action::kUp: return {c.x, c.y - 1};
    case Action::kDown: return {c.x, c.y + 1};
    case Action::kLeft: return {c.x - 1, c.y};
    case Action::kRight: return {c.x + 1, c.y};
  }
  return c;
}

std::string_view action_name(Action a) {
  static constexpr std::array<std::string_view, kNumActions> kNames = {"up", "down", "left",
                                                                       "right"};
  return kNames[index_of(a)];
}

std::optional<Action> parse_action(std::string_view name) {
  for (Action a : kAllActions) {
    if (action_name(a) == name) return a;
  }
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, kNumEventKinds> kEventNames = {
    "ate_food",         "hit_wall",           "hit_self", "hit_other_body",
    "forbidden_move",   "head_to_head_loss",  "head_to_head_mutual",
    "starved",          "killed_other",       "survived_turn", "won"};

}  // namespace

std::string_view event_name(EventKind kind) { return kEventNames[static_cast<int>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (int i = 0; i < kNumEventKinds; ++i) {
    if (kEventNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

bool is_elimination(EventKind kind) {
  switch (kind) {
    case EventKind::kHitWall:
    case EventKind::kHitSelf:
    case EventKind::kHitOtherBody:
    case EventKind::kForbiddenMove:
    case EventKind::kHeadToHeadLoss:
    case EventKind::kHeadToHeadMutual:
    case EventKind::kStarved:
      return true;
    default:
      return false;
  }
}

void GameConfig::validate() const {
  if (width < 5) throw ConfigError("game.width: must be >= 5, got " + std::to_string(width));
  if (height < 5) throw ConfigError("game.height: must be >= 5, got " + std::to_string(height));
  if (n_snakes < 2) {
    throw ConfigError("game.n_snakes: must be >= 2, got " + std::to_string(n_snakes));
  }
  if (initial_length < 1) {
    throw ConfigError("game.initial_length: must be >= 1, got " + std::to_string(initial_length));
  }
  if (!(food_spawn_probability >= 0.0 && food_spawn_probability <= 1.0)) {
    throw ConfigError("game.food_spawn_probability: must be in [0, 1]");
  }
  const int boundary = 2 * width + 2 * height - 4;
  if (boundary < n_snakes) {
    throw ConfigError("game.n_snakes: " + std::to_string(n_snakes) + " snakes do not fit on " +
                      std::to_string(boundary) + " boundary cells");
  }
  if (width * height < n_snakes + 1) {
    throw ConfigError("game: board too small for snakes plus one food");
  }
}

const SnakeState& BoardState::snake(AgentId id) const {
  if (!has_snake(id)) throw ContractViolation("unknown agent id " + std::to_string(id));
  return snakes[id - 1];
}

SnakeState& BoardState::snake(AgentId id) {
  if (!has_snake(id)) throw ContractViolation("unknown agent id " + std::to_string(id));
  return snakes[id - 1];
}

int BoardState::num_alive() const {
  return static_cast<int>(
      std::count_if(snakes.begin(), snakes.end(), [](const SnakeState& s) { return s.alive; }));
}

std::vector<AgentId> BoardState::alive_ids() const {
  std::vector<AgentId> ids;
  for (const auto& s : snakes) {
    if (s.alive) ids.push_back(s.id);
  }
  return ids;
}

bool BoardState::has_food(Coord c) const {
  return std::binary_search(food.begin(), food.end(), c);
}

namespace {

// Free cells in row-major order (y outer, x inner): not food, not a living body.
std::vector<Coord> free_cells(const BoardState& board) {
  std::vector<char> blocked(static_cast<size_t>(board.width * board.height), 0);
  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    for (Coord c : s.body) {
      if (board.in_bounds(c)) blocked[c.y * board.width + c.x] = 1;
    }
  }
  for (Coord c : board.food) blocked[c.y * board.width + c.x] = 1;
  std::vector<Coord> cells;
  for (int y = 0; y < board.height; ++y) {
    for (int x = 0; x < board.width; ++x) {
      if (!blocked[y * board.width + x]) cells.push_back({x, y});
    }
  }
  return cells;
}

void place_food(BoardState& board, Coord c) {
  board.food.insert(std::upper_bound(board.food.begin(), board.food.end(), c), c);
}

bool spawn_random_food(BoardState& board) {
  const auto cells = free_cells(board);
  if (cells.empty()) return false;
  place_food(board, cells[board.rng.uniform(cells.size())]);
  return true;
}

}  // namespace

BoardState init_game(const GameConfig& config) {
  config.validate();
  BoardState board;
  board.width = config.width;
  board.height = config.height;
  board.food_spawn_probability = config.food_spawn_probability;
  board.rng.reseed(config.seed);

  // Boundary cells clockwise from the top-left corner.
  std::vector<Coord> boundary;
  for (int x = 0; x < config.width; ++x) boundary.push_back({x, 0});
  for (int y = 1; y < config.height; ++y) boundary.push_back({config.width - 1, y});
  for (int x = config.width - 2; x >= 0; --x) boundary.push_back({x, config.height - 1});
  for (int y = config.height - 2; y >= 1; --y) boundary.push_back({0, y});

  // Partial Fisher-Yates: the first n_snakes entries become spawn cells.
  for (int i = 0; i < config.n_snakes; ++i) {
    const auto j = i + static_cast<int>(board.rng.uniform(boundary.size() - i));
    std::swap(boundary[i], boundary[j]);
  }
  for (int i = 0; i < config.n_snakes; ++i) {
    SnakeState s;
    s.id = i + 1;
    s.body.assign(static_cast<size_t>(config.initial_length), boundary[i]);
    board.snakes.push_back(std::move(s));
  }
  spawn_random_food(board);
  return board;
}

std::vector<TurnEvent> step_in_place(BoardState& board, const JointAction& joint_actions) {
  if (is_terminal(board)) throw ContractViolation("step called on a terminal board");
  for (const auto& [id, action] : joint_actions) {
    if (!board.has_snake(id) || !board.snake(id).alive) {
      throw ContractViolation("action supplied for absent or dead snake " + std::to_string(id));
    }
  }
  for (const auto& s : board.snakes) {
    if (s.alive && !joint_actions.contains(s.id)) {
      throw ContractViolation("missing action for snake " + std::to_string(s.id));
    }
  }

  const size_t n = board.snakes.size();
  std::vector<TurnEvent> events;
  std::vector<std::optional<EventKind>> eliminated(n);

  // 1. Health.
  for (auto& s : board.snakes) {
    if (s.alive) s.health -= 1;
  }

  // 2. Forbidden moves are eliminated before anyone moves.
  for (auto& s : board.snakes) {
    if (!s.alive) continue;
    const Action a = joint_actions.at(s.id);
    if (s.facing && a == opposite(*s.facing)) {
      eliminated[s.id - 1] = EventKind::kForbiddenMove;
      s.alive = false;
    }
  }

  // 3. Simultaneous move; every tail retracts, growth re-adds it below.
  for (auto& s : board.snakes) {
    if (!s.alive) continue;
    const Coord next = step_towards(s.head(), joint_actions.at(s.id));
    s.body.insert(s.body.begin(), next);
    s.body.pop_back();
  }

  // 4. Feeding.
  for (auto& s : board.snakes) {
    if (!s.alive) continue;
    auto it = std::lower_bound(board.food.begin(), board.food.end(), s.head());
    if (it != board.food.end() && *it == s.head()) {
      s.health = kMaxHealth;
      s.body.push_back(s.body.back());
      events.push_back({s.id, EventKind::kAteFood});
    }
  }
  // Food is consumed after all snakes had a chance to reach it.
  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    auto it = std::lower_bound(board.food.begin(), board.food.end(), s.head());
    if (it != board.food.end() && *it == s.head()) board.food.erase(it);
  }

  // 5. Eliminations against post-move positions. Every snake that survived
  // phase 2 takes part, including ones that are eliminated in this phase.
  std::vector<AgentId> killers;
  for (auto& s : board.snakes) {
    if (!s.alive) continue;
    const Coord head = s.head();
    std::optional<EventKind> cause;
    if (!board.in_bounds(head)) {
      cause = EventKind::kHitWall;
    }
    if (!cause) {
      for (size_t k = 1; k < s.body.size() && !cause; ++k) {
        if (s.body[k] == head) cause = EventKind::kHitSelf;
      }
    }
    if (!cause) {
      for (const auto& other : board.snakes) {
        if (!other.alive || other.id == s.id) continue;
        for (size_t k = 1; k < other.body.size(); ++k) {
          if (other.body[k] == head) {
            cause = EventKind::kHitOtherBody;
            break;
          }
        }
        if (cause) break;
      }
    }
    if (!cause) {
      int longest_rival = -1;
      int rivals_at_max = 0;
      for (const auto& other : board.snakes) {
        if (!other.alive || other.id == s.id || other.head() != head) continue;
        if (other.length() > longest_rival) {
          longest_rival = other.length();
          rivals_at_max = 1;
        } else if (other.length() == longest_rival) {
          ++rivals_at_max;
        }
      }
      if (longest_rival >= 0) {
        if (s.length() < longest_rival) {
          cause = EventKind::kHeadToHeadLoss;
        } else if (s.length() == longest_rival) {
          cause = EventKind::kHeadToHeadMutual;
        } else {
          // Strictly longest on this cell: credited once per victim.
          for (const auto& other : board.snakes) {
            if (other.alive && other.id != s.id && other.head() == head) killers.push_back(s.id);
          }
        }
      }
    }
    if (!cause && s.health <= 0) cause = EventKind::kStarved;
    if (cause) eliminated[s.id - 1] = cause;
  }
  for (size_t i = 0; i < n; ++i) {
    if (eliminated[i]) {
      board.snakes[i].alive = false;
      events.push_back({static_cast<AgentId>(i + 1), *eliminated[i]});
    }
  }
  for (AgentId id : killers) events.push_back({id, EventKind::kKilledOther});

  // 6. Food spawn. The probability draw always happens so the RNG stream
  // does not depend on the food count.
  const bool chance = board.rng.bernoulli(board.food_spawn_probability);
  if (chance || board.food.empty()) spawn_random_food(board);

  // 7. Bookkeeping.
  board.turn += 1;
  for (auto& s : board.snakes) {
    if (!s.alive) continue;
    s.facing = joint_actions.at(s.id);
    events.push_back({s.id, EventKind::kSurvivedTurn});
  }
  if (board.num_alive() == 1) events.push_back({board.alive_ids().front(), EventKind::kWon});
  return events;
}

StepResult step(const BoardState& board, const JointAction& joint_actions) {
  StepResult result{board, {}};
  result.events = step_in_place(result.board, joint_actions);
  return result;
}

std::optional<GameOutcome> is_terminal(const BoardState& board) {
  const int alive = board.num_alive();
  if (alive >= 2) return std::nullopt;
  if (alive == 0) return GameOutcome{};
  return GameOutcome{board.alive_ids().front()};
}

std::string render_ascii(const BoardState& board) {
  std::vector<std::string> rows(static_cast<size_t>(board.height),
                                std::string(static_cast<size_t>(board.width), '.'));
  for (Coord c : board.food) rows[c.y][c.x] = '*';
  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    for (size_t k = s.body.size(); k-- > 1;) {
      const Coord c = s.body[k];
      if (board.in_bounds(c)) rows[c.y][c.x] = static_cast<char>('a' + (s.id - 1) % 26);
    }
    if (board.in_bounds(s.head())) {
      rows[s.head().y][s.head().x] = static_cast<char>('0' + s.id % 10);
    }
  }
  std::ostringstream out;
  for (const auto& r : rows) out << r << '\n';
  return out.str();
}

}  // namespace bsnake
