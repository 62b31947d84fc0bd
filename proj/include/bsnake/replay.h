#pragma once

// Line-delimited JSON game replays.
//
// Line 1 is the header: {"type":"header","version":1,"game":GameConfig,
// "agents":[{"id","name","heuristics"}...],"metadata":{...},"initial":Snapshot}.
// Every following line is one resolved turn: {"type":"turn","turn":t,
// "snakes":[...],"food":[[x,y]...],"actions":{"1":"up",...},
// "events":[{"agent":1,"kind":"ate_food"}...]} where snakes/food describe the
// board after the turn. Output is a pure function of (config, actions).

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsnake/config.h"
#include "bsnake/engine.h"

namespace bsnake {

struct ReplayAgent {
  AgentId id = 0;
  std::string name;
  Json heuristics = Json::object();
  friend bool operator==(const ReplayAgent&, const ReplayAgent&) = default;
};

struct ReplayHeader {
  GameConfig game;
  std::vector<ReplayAgent> agents;
  Json metadata = Json::object();
  // Board after init_game (rng state excluded).
  std::vector<SnakeState> initial_snakes;
  std::vector<Coord> initial_food;
};

struct ReplayTurn {
  int turn = 0;
  std::vector<SnakeState> snakes;
  std::vector<Coord> food;
  JointAction actions;
  std::vector<TurnEvent> events;
  friend bool operator==(const ReplayTurn&, const ReplayTurn&) = default;
};

struct Replay {
  ReplayHeader header;
  std::vector<ReplayTurn> turns;

  // Name for a snake id, falling back to "snake-<id>".
  std::string agent_name(AgentId id) const;
  int length() const { return static_cast<int>(turns.size()); }
};

// Collects a replay while a game is played.
class ReplayRecorder {
 public:
  ReplayRecorder(const GameConfig& game, const BoardState& initial,
                 std::vector<ReplayAgent> agents = {}, Json metadata = Json::object());
  void record(const BoardState& after, const JointAction& actions,
              const std::vector<TurnEvent>& events);
  const Replay& replay() const { return replay_; }
  Replay take() { return std::move(replay_); }

 private:
  Replay replay_;
};

Json header_to_json(const ReplayHeader& header);
Json turn_to_json(const ReplayTurn& turn);

void write_replay(const Replay& replay, std::ostream& out);
std::string replay_to_string(const Replay& replay);
void write_replay_file(const Replay& replay, const std::string& path);

// Throws ParseError naming the source and 1-based line of a bad record.
Replay read_replay(std::istream& in, const std::string& source = "<replay>");
Replay read_replay_file(const std::string& path);

// Board as recorded after turn index `t` (0 = initial board, t = after turn t).
// The rng state of the result is default-constructed.
BoardState board_from_replay(const Replay& replay, int t);

// Re-runs the engine from the header config and recorded actions up to turn t.
BoardState resimulate(const Replay& replay, int t);

}  // namespace bsnake
