#include "bsnake/wire.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracle/wire_payloads.h"

namespace bsnake {
namespace {

WireSnake wire_snake(std::string id, std::vector<WireCoord> body, int health = 100) {
  return {std::move(id), health, body, body.front(), static_cast<int>(body.size())};
}

WireGameState state(int w, int h, std::vector<WireSnake> snakes, std::vector<WireCoord> food = {}) {
  WireGameState s;
  s.game_id = "g1";
  s.turn = 7;
  s.width = w;
  s.height = h;
  s.food = std::move(food);
  s.you = snakes.front();
  s.snakes = std::move(snakes);
  return s;
}

TEST(Decode, FlipsTheYAxis) {
  const auto v = decode_wire_state(state(11, 11, {wire_snake("a", {{0, 0}, {1, 0}})}, {{3, 10}}));
  EXPECT_EQ(v.board.snakes[0].body.front(), (Coord{0, 10}));
  EXPECT_EQ(v.board.snakes[0].body.back(), (Coord{1, 10}));
  EXPECT_EQ(v.board.food, (std::vector<Coord>{{3, 0}}));
  EXPECT_EQ(v.board.snakes[0].facing, Action::kLeft);
  EXPECT_EQ(v.board.turn, 7);
  EXPECT_EQ(v.you, 1);
}

TEST(Decode, StackedStartBody) {
  const auto v = decode_wire_state(state(11, 11, {wire_snake("a", {{1, 1}, {1, 1}, {1, 1}})}));
  const SnakeState& s = v.board.snakes[0];
  EXPECT_EQ(s.length(), 3);
  EXPECT_EQ(s.body, (std::vector<Coord>(3, Coord{1, 9})));
  EXPECT_FALSE(s.facing.has_value());
}

TEST(Decode, FacingFollowsScreenDirection) {
  // Moving up in the wire frame (y grows) is moving up on screen.
  const auto v = decode_wire_state(state(7, 7, {wire_snake("a", {{3, 4}, {3, 3}})}));
  EXPECT_EQ(v.board.snakes[0].facing, Action::kUp);
}

TEST(Decode, YouIsFoundById) {
  auto s = state(7, 7, {wire_snake("a", {{0, 0}}), wire_snake("b", {{5, 5}})});
  s.you = s.snakes[1];
  const auto v = decode_wire_state(s);
  EXPECT_EQ(v.you, 2);
  EXPECT_EQ(v.ids, (std::vector<std::string>{"a", "b"}));
}

TEST(Decode, ValidationErrors) {
  auto expect_error = [](WireGameState s, const std::string& fragment) {
    try {
      decode_wire_state(s);
      ADD_FAILURE() << "no error for " << fragment;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
  };
  expect_error(state(5, 5, {wire_snake("a", {{5, 0}})}), "board.snakes[0].body[0]");
  expect_error(state(5, 5, {wire_snake("a", {{0, -1}})}), "off the 5x5 board");
  expect_error(state(5, 5, {wire_snake("a", {{0, 0}})}, {{0, 5}}), "board.food[0]");
  expect_error(state(5, 5, {wire_snake("a", {{0, 0}})}, {{1, 1}, {1, 1}}), "duplicate food");
  auto s = state(5, 5, {wire_snake("a", {{0, 0}, {0, 1}})});
  s.snakes[0].head = {0, 1};
  expect_error(s, "head");
  s = state(5, 5, {wire_snake("a", {{0, 0}, {0, 1}})});
  s.snakes[0].length = 3;
  expect_error(s, "length");
  expect_error(state(5, 5, {wire_snake("a", {{0, 0}, {2, 0}})}), "not adjacent");
  expect_error(state(5, 5, {wire_snake("a", {{0, 0}}, 101)}), "health");
  expect_error(state(5, 5, {wire_snake("a", {{0, 0}}), wire_snake("a", {{3, 3}})}), "duplicate id");
  s = state(5, 5, {wire_snake("a", {{0, 0}})});
  s.you.id = "zzz";
  expect_error(s, "you.id");
}

TEST(Parse, FieldErrorsAndExtraFields) {
  Json j = to_json(state(5, 5, {wire_snake("a", {{0, 0}})}));
  j["board"]["hazards"] = Json::array();
  j["game"]["ruleset"] = {{"name", "standard"}};
  j["you"]["shout"] = "hi";
  EXPECT_EQ(parse_wire_state(j), state(5, 5, {wire_snake("a", {{0, 0}})}));

  Json missing = j;
  missing["board"].erase("width");
  EXPECT_THROW(parse_wire_state(missing), ParseError);
  Json typed = j;
  typed["turn"] = "7";
  EXPECT_THROW(parse_wire_state(typed), ParseError);
  Json coords = j;
  coords["board"]["food"] = Json::array({Json{{"x", 1}}});
  try {
    parse_wire_state(coords);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("board.food[0].y"), std::string::npos);
  }
  EXPECT_THROW(parse_wire_state(Json::array()), ParseError);
}

std::vector<WireCoord> sorted(std::vector<WireCoord> v) {
  std::sort(v.begin(), v.end(), [](WireCoord a, WireCoord b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
  });
  return v;
}

TEST(RoundTrip, DecodeThenEncodeOverRandomPayloads) {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    const WireGameState p = oracle::random_payload(rng);
    const WireGameState back = encode_wire_state(decode_wire_state(p));
    ASSERT_EQ(back.game_id, p.game_id);
    ASSERT_EQ(back.turn, p.turn);
    ASSERT_EQ(back.width, p.width);
    ASSERT_EQ(back.height, p.height);
    ASSERT_EQ(back.snakes, p.snakes) << "payload " << i;
    ASSERT_EQ(back.you, p.you);
    ASSERT_EQ(sorted(back.food), sorted(p.food));
    // The JSON text survives too once food is in a canonical order.
    WireGameState canon = p;
    canon.food = back.food;
    ASSERT_EQ(to_json(back).dump(), to_json(canon).dump());
    ASSERT_EQ(parse_wire_state(to_json(p)), p);
  }
}

TEST(RoundTrip, EncodeThenDecodeEngineBoards) {
  Rng rng(5);
  for (uint64_t g = 0; g < 40; ++g) {
    GameConfig cfg;
    cfg.width = 7 + static_cast<int>(g % 5);
    cfg.height = 7 + static_cast<int>(g % 3);
    cfg.n_snakes = 2 + static_cast<int>(g % 3);
    cfg.seed = g;
    BoardState b = init_game(cfg);
    while (!is_terminal(b)) {
      for (AgentId id : b.alive_ids()) {
        WireBoardView view;
        view.game_id = "x";
        view.board = b;
        view.you = id;
        for (const auto& s : b.snakes) view.ids.push_back("s" + std::to_string(s.id));
        const WireBoardView back = decode_wire_state(encode_wire_state(view));
        ASSERT_EQ(back.board.food, b.food);
        ASSERT_EQ(back.board.turn, b.turn);
        ASSERT_EQ(back.ids[back.you - 1], view.ids[id - 1]);
        std::vector<SnakeState> alive;
        for (const auto& s : b.snakes) {
          if (s.alive) alive.push_back(s);
        }
        ASSERT_EQ(back.board.snakes.size(), alive.size());
        for (size_t k = 0; k < alive.size(); ++k) {
          EXPECT_EQ(back.board.snakes[k].body, alive[k].body);
          EXPECT_EQ(back.board.snakes[k].health, alive[k].health);
          EXPECT_EQ(back.board.snakes[k].facing, alive[k].facing);
        }
      }
      JointAction joint;
      for (AgentId id : b.alive_ids()) joint[id] = action_from_index(rng.uniform(4));
      step_in_place(b, joint);
    }
  }
}

}  // namespace
}  // namespace bsnake
