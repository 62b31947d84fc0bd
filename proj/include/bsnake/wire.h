#pragma once

// Webhook payloads of the public Battlesnake API (v1) and their mapping onto
// the engine board. The wire frame has y pointing up; the engine has y
// pointing down, so engine_y = height - 1 - wire_y. Action names mean the
// same screen direction in both frames and need no conversion.

#include <string>
#include <vector>

#include "bsnake/config.h"
#include "bsnake/engine.h"

namespace bsnake {

struct WireCoord {
  int x = 0;
  int y = 0;
  friend bool operator==(const WireCoord&, const WireCoord&) = default;
};

struct WireSnake {
  std::string id;
  int health = kMaxHealth;
  std::vector<WireCoord> body;
  WireCoord head;
  int length = 0;
  friend bool operator==(const WireSnake&, const WireSnake&) = default;
};

struct WireGameState {
  std::string game_id;
  int turn = 0;
  int width = 0;
  int height = 0;
  std::vector<WireCoord> food;
  std::vector<WireSnake> snakes;
  WireSnake you;
  friend bool operator==(const WireGameState&, const WireGameState&) = default;
};

// Reads the fields above from a request body; other fields are ignored.
// Throws ParseError naming the missing or mistyped field.
WireGameState parse_wire_state(const Json& j);
Json to_json(const WireGameState& state);

struct WireBoardView {
  std::string game_id;
  BoardState board;               // snake i + 1 is wire snake i
  std::vector<std::string> ids;   // wire id of each engine snake
  AgentId you = 0;
};

// Throws ParseError when the payload breaks its invariants: coordinates off
// the board, head != body[0], length != |body|, non-adjacent segments,
// health outside [0, 100], duplicate ids or food, or `you` not on the board.
// The facing of each snake is the direction from body[1] to body[0]; none
// when the two are stacked.
WireBoardView decode_wire_state(const WireGameState& state);

// Inverse of decode_wire_state. Food is emitted in engine order, so a
// round trip preserves the food set but not the order of the payload list.
WireGameState encode_wire_state(const WireBoardView& view);

}  // namespace bsnake
