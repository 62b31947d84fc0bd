#include "bsnake/wire.h"

#include <algorithm>
#include <set>

namespace bsnake {

namespace {

const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) throw ParseError(path + ": expected object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(path + "." + key + ": missing");
  return *it;
}

int int_field(const Json& j, const std::string& path, const char* key) {
  const Json& v = field(j, path, key);
  if (!v.is_number_integer()) throw ParseError(path + "." + key + ": expected integer");
  return v.get<int>();
}

std::string string_field(const Json& j, const std::string& path, const char* key) {
  const Json& v = field(j, path, key);
  if (!v.is_string()) throw ParseError(path + "." + key + ": expected string");
  return v.get<std::string>();
}

const Json& array_field(const Json& j, const std::string& path, const char* key) {
  const Json& v = field(j, path, key);
  if (!v.is_array()) throw ParseError(path + "." + key + ": expected list");
  return v;
}

WireCoord parse_coord(const Json& j, const std::string& path) {
  return {int_field(j, path, "x"), int_field(j, path, "y")};
}

std::vector<WireCoord> parse_coords(const Json& list, const std::string& path) {
  std::vector<WireCoord> out;
  for (size_t i = 0; i < list.size(); ++i) {
    out.push_back(parse_coord(list[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

WireSnake parse_snake(const Json& j, const std::string& path) {
  WireSnake s;
  s.id = string_field(j, path, "id");
  s.health = int_field(j, path, "health");
  s.body = parse_coords(array_field(j, path, "body"), path + ".body");
  s.head = parse_coord(field(j, path, "head"), path + ".head");
  s.length = int_field(j, path, "length");
  return s;
}

Json coord_json(WireCoord c) { return Json{{"x", c.x}, {"y", c.y}}; }

Json snake_json(const WireSnake& s) {
  Json body = Json::array();
  for (WireCoord c : s.body) body.push_back(coord_json(c));
  return Json{{"id", s.id},
              {"health", s.health},
              {"body", body},
              {"head", coord_json(s.head)},
              {"length", s.length}};
}

std::string at(const std::string& path, WireCoord c) {
  return path + " (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

}  // namespace

WireGameState parse_wire_state(const Json& j) {
  WireGameState s;
  s.game_id = string_field(field(j, "", "game"), "game", "id");
  s.turn = int_field(j, "", "turn");
  const Json& board = field(j, "", "board");
  s.width = int_field(board, "board", "width");
  s.height = int_field(board, "board", "height");
  s.food = parse_coords(array_field(board, "board", "food"), "board.food");
  const Json& snakes = array_field(board, "board", "snakes");
  for (size_t i = 0; i < snakes.size(); ++i) {
    s.snakes.push_back(parse_snake(snakes[i], "board.snakes[" + std::to_string(i) + "]"));
  }
  s.you = parse_snake(field(j, "", "you"), "you");
  return s;
}

Json to_json(const WireGameState& s) {
  Json food = Json::array();
  for (WireCoord c : s.food) food.push_back(coord_json(c));
  Json snakes = Json::array();
  for (const WireSnake& sn : s.snakes) snakes.push_back(snake_json(sn));
  return Json{{"game", Json{{"id", s.game_id}}},
              {"turn", s.turn},
              {"board", Json{{"height", s.height},
                             {"width", s.width},
                             {"food", food},
                             {"snakes", snakes}}},
              {"you", snake_json(s.you)}};
}

WireBoardView decode_wire_state(const WireGameState& s) {
  if (s.width < 1 || s.height < 1) throw ParseError("board: width and height must be >= 1");
  if (s.turn < 0) throw ParseError("turn: must be >= 0");
  WireBoardView view;
  view.game_id = s.game_id;
  BoardState& b = view.board;
  b.width = s.width;
  b.height = s.height;
  b.turn = s.turn;
  b.food_spawn_probability = 0.0;
  auto to_engine = [&](WireCoord c, const std::string& path) {
    if (c.x < 0 || c.x >= s.width || c.y < 0 || c.y >= s.height) {
      throw ParseError(at(path, c) + " is off the " + std::to_string(s.width) + "x" +
                       std::to_string(s.height) + " board");
    }
    return Coord{c.x, s.height - 1 - c.y};
  };

  for (size_t i = 0; i < s.food.size(); ++i) {
    b.food.push_back(to_engine(s.food[i], "board.food[" + std::to_string(i) + "]"));
  }
  std::sort(b.food.begin(), b.food.end());
  if (std::adjacent_find(b.food.begin(), b.food.end()) != b.food.end()) {
    throw ParseError("board.food: duplicate food cell");
  }

  std::set<std::string> ids;
  for (size_t i = 0; i < s.snakes.size(); ++i) {
    const WireSnake& w = s.snakes[i];
    const std::string path = "board.snakes[" + std::to_string(i) + "]";
    if (!ids.insert(w.id).second) throw ParseError(path + ".id: duplicate id '" + w.id + "'");
    if (w.body.empty()) throw ParseError(path + ".body: empty");
    if (w.head != w.body.front()) throw ParseError(path + ".head: differs from body[0]");
    if (w.length != static_cast<int>(w.body.size())) {
      throw ParseError(path + ".length: " + std::to_string(w.length) + " but body has " +
                       std::to_string(w.body.size()) + " segments");
    }
    if (w.health < 0 || w.health > kMaxHealth) {
      throw ParseError(path + ".health: outside [0, " + std::to_string(kMaxHealth) + "]");
    }
    SnakeState sn;
    sn.id = static_cast<AgentId>(i) + 1;
    sn.health = w.health;
    for (size_t k = 0; k < w.body.size(); ++k) {
      sn.body.push_back(to_engine(w.body[k], path + ".body[" + std::to_string(k) + "]"));
      if (k > 0 && manhattan(sn.body[k], sn.body[k - 1]) > 1) {
        throw ParseError(path + ".body[" + std::to_string(k) + "]: not adjacent to the previous "
                         "segment");
      }
    }
    if (sn.body.size() > 1 && sn.body[0] != sn.body[1]) {
      for (Action a : kAllActions) {
        if (step_towards(sn.body[1], a) == sn.body[0]) sn.facing = a;
      }
    }
    b.snakes.push_back(std::move(sn));
    view.ids.push_back(w.id);
  }

  for (size_t i = 0; i < s.snakes.size(); ++i) {
    if (s.snakes[i].id == s.you.id) view.you = static_cast<AgentId>(i) + 1;
  }
  if (view.you == 0) throw ParseError("you.id: '" + s.you.id + "' is not on the board");
  return view;
}

WireGameState encode_wire_state(const WireBoardView& view) {
  const BoardState& b = view.board;
  if (view.ids.size() != b.snakes.size()) {
    throw ContractViolation("encode_wire_state: one wire id per snake required");
  }
  if (!b.has_snake(view.you)) throw ContractViolation("encode_wire_state: unknown snake");
  WireGameState s;
  s.game_id = view.game_id;
  s.turn = b.turn;
  s.width = b.width;
  s.height = b.height;
  auto to_wire = [&](Coord c) { return WireCoord{c.x, b.height - 1 - c.y}; };
  for (Coord c : b.food) s.food.push_back(to_wire(c));
  for (const SnakeState& sn : b.snakes) {
    if (!sn.alive) continue;
    WireSnake w;
    w.id = view.ids[sn.id - 1];
    w.health = sn.health;
    for (Coord c : sn.body) w.body.push_back(to_wire(c));
    w.head = w.body.front();
    w.length = static_cast<int>(w.body.size());
    s.snakes.push_back(std::move(w));
  }
  const auto& me = b.snake(view.you);
  s.you.id = view.ids[view.you - 1];
  s.you.health = me.health;
  for (Coord c : me.body) s.you.body.push_back(to_wire(c));
  if (!s.you.body.empty()) s.you.head = s.you.body.front();
  s.you.length = static_cast<int>(s.you.body.size());
  return s;
}

}  // namespace bsnake
