#include "bsnake/replay.h"

#include <fstream>
#include <sstream>

namespace bsnake {

namespace {

Json coord_to_json(Coord c) { return Json::array({c.x, c.y}); }

Coord coord_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ParseError("expected [x, y] coordinate");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

Json snakes_to_json(const std::vector<SnakeState>& snakes) {
  Json out = Json::array();
  for (const auto& s : snakes) {
    Json body = Json::array();
    for (Coord c : s.body) body.push_back(coord_to_json(c));
    out.push_back(Json{{"id", s.id},
                       {"body", body},
                       {"health", s.health},
                       {"alive", s.alive},
                       {"facing", s.facing ? Json(action_name(*s.facing)) : Json(nullptr)}});
  }
  return out;
}

std::vector<SnakeState> snakes_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("snakes: expected array");
  std::vector<SnakeState> out;
  for (const auto& js : j) {
    SnakeState s;
    s.id = js.at("id").get<int>();
    for (const auto& c : js.at("body")) s.body.push_back(coord_from_json(c));
    if (s.body.empty()) throw ParseError("snake body is empty");
    s.health = js.at("health").get<int>();
    s.alive = js.at("alive").get<bool>();
    const Json& facing = js.at("facing");
    if (!facing.is_null()) {
      auto a = parse_action(facing.get<std::string>());
      if (!a) throw ParseError("unknown facing '" + facing.get<std::string>() + "'");
      s.facing = a;
    }
    out.push_back(std::move(s));
  }
  return out;
}

Json food_to_json(const std::vector<Coord>& food) {
  Json out = Json::array();
  for (Coord c : food) out.push_back(coord_to_json(c));
  return out;
}

std::vector<Coord> food_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("food: expected array");
  std::vector<Coord> out;
  for (const auto& c : j) out.push_back(coord_from_json(c));
  return out;
}

}  // namespace

std::string Replay::agent_name(AgentId id) const {
  for (const auto& a : header.agents) {
    if (a.id == id && !a.name.empty()) return a.name;
  }
  return "snake-" + std::to_string(id);
}

ReplayRecorder::ReplayRecorder(const GameConfig& game, const BoardState& initial,
                               std::vector<ReplayAgent> agents, Json metadata) {
  replay_.header.game = game;
  replay_.header.agents = std::move(agents);
  replay_.header.metadata = std::move(metadata);
  replay_.header.initial_snakes = initial.snakes;
  replay_.header.initial_food = initial.food;
}

void ReplayRecorder::record(const BoardState& after, const JointAction& actions,
                            const std::vector<TurnEvent>& events) {
  replay_.turns.push_back({after.turn, after.snakes, after.food, actions, events});
}

Json header_to_json(const ReplayHeader& h) {
  Json agents = Json::array();
  for (const auto& a : h.agents) {
    agents.push_back(Json{{"id", a.id}, {"name", a.name}, {"heuristics", a.heuristics}});
  }
  return Json{{"type", "header"},
              {"version", 1},
              {"game", to_json(h.game)},
              {"agents", agents},
              {"metadata", h.metadata},
              {"initial",
               Json{{"snakes", snakes_to_json(h.initial_snakes)},
                    {"food", food_to_json(h.initial_food)}}}};
}

Json turn_to_json(const ReplayTurn& t) {
  Json actions = Json::object();
  for (const auto& [id, a] : t.actions) actions[std::to_string(id)] = action_name(a);
  Json events = Json::array();
  for (const auto& e : t.events) {
    events.push_back(Json{{"agent", e.agent_id}, {"kind", event_name(e.kind)}});
  }
  return Json{{"type", "turn"},
              {"turn", t.turn},
              {"snakes", snakes_to_json(t.snakes)},
              {"food", food_to_json(t.food)},
              {"actions", actions},
              {"events", events}};
}

void write_replay(const Replay& replay, std::ostream& out) {
  out << header_to_json(replay.header).dump() << '\n';
  for (const auto& t : replay.turns) out << turn_to_json(t).dump() << '\n';
}

std::string replay_to_string(const Replay& replay) {
  std::ostringstream out;
  write_replay(replay, out);
  return out.str();
}

void write_replay_file(const Replay& replay, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_replay(replay, out);
}

Replay read_replay(std::istream& in, const std::string& source) {
  Replay replay;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    try {
      const Json j = Json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "header") {
        if (have_header) throw ParseError("duplicate header");
        ReplayHeader& h = replay.header;
        h.game = parse_game_config(j.at("game"), "game");
        for (const auto& a : j.at("agents")) {
          h.agents.push_back({a.at("id").get<int>(), a.at("name").get<std::string>(),
                              a.value("heuristics", Json::object())});
        }
        h.metadata = j.value("metadata", Json::object());
        h.initial_snakes = snakes_from_json(j.at("initial").at("snakes"));
        h.initial_food = food_from_json(j.at("initial").at("food"));
        have_header = true;
      } else if (type == "turn") {
        if (!have_header) throw ParseError("turn record before header");
        ReplayTurn t;
        t.turn = j.at("turn").get<int>();
        const int expected = replay.turns.empty() ? 1 : replay.turns.back().turn + 1;
        if (t.turn != expected) {
          throw ParseError("turn " + std::to_string(t.turn) + " where " +
                           std::to_string(expected) + " was expected");
        }
        t.snakes = snakes_from_json(j.at("snakes"));
        t.food = food_from_json(j.at("food"));
        for (const auto& [key, value] : j.at("actions").items()) {
          auto a = parse_action(value.get<std::string>());
          if (!a) throw ParseError("unknown action '" + value.get<std::string>() + "'");
          t.actions[std::stoi(key)] = *a;
        }
        for (const auto& e : j.at("events")) {
          auto kind = parse_event_kind(e.at("kind").get<std::string>());
          if (!kind) throw ParseError("unknown event kind");
          t.events.push_back({e.at("agent").get<int>(), *kind});
        }
        replay.turns.push_back(std::move(t));
      } else {
        throw ParseError("unknown record type '" + type + "'");
      }
    } catch (const ParseError& e) {
      throw ParseError(where + e.what());
    } catch (const ConfigError& e) {
      throw ParseError(where + e.what());
    } catch (const std::exception& e) {
      throw ParseError(where + "corrupt record: " + e.what());
    }
  }
  if (!have_header) throw ParseError(source + ": missing header record");
  return replay;
}

Replay read_replay_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open replay");
  return read_replay(in, path);
}

BoardState board_from_replay(const Replay& replay, int t) {
  if (t < 0 || t > replay.length()) throw ContractViolation("board_from_replay: turn out of range");
  BoardState b;
  b.width = replay.header.game.width;
  b.height = replay.header.game.height;
  b.food_spawn_probability = replay.header.game.food_spawn_probability;
  if (t == 0) {
    b.snakes = replay.header.initial_snakes;
    b.food = replay.header.initial_food;
  } else {
    const ReplayTurn& rec = replay.turns[t - 1];
    b.snakes = rec.snakes;
    b.food = rec.food;
    b.turn = rec.turn;
  }
  return b;
}

BoardState resimulate(const Replay& replay, int t) {
  if (t < 0 || t > replay.length()) throw ContractViolation("resimulate: turn out of range");
  BoardState b = init_game(replay.header.game);
  for (int i = 0; i < t; ++i) step_in_place(b, replay.turns[i].actions);
  return b;
}

}  // namespace bsnake
