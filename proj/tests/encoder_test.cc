#include "bsnake/encoder.h"

#include <gtest/gtest.h>

#include <set>
#include <tuple>

#include "oracle/encoder_golden.h"
#include "test_util.h"

namespace bsnake {
namespace {

using testing::make_board;
using oracle::kSnakeOneCells;
using oracle::random_boards;

BoardState fixture() { return oracle::golden_fixture(); }

TEST(Encode, HandEnumeratedFixture) {
  const ObservationTensor t = encode(fixture(), 1);
  ASSERT_EQ(t.size(), 7u * 7u * 3u);
  std::vector<double> expected(7 * 7 * 3, 0.0);
  // x-major, then y, then channel.
  for (auto [x, y, c, v] : kSnakeOneCells) expected[x * 21 + y * 3 + c] = v;
  EXPECT_EQ(t.values, expected);
}

TEST(Encode, FoodChannel) {
  BoardState b = make_board(7, 7, {{{{4, 4}, {4, 5}, {4, 6}}, 100, Action::kUp}}, {{2, 3}});
  const ObservationTensor t = encode(b, 1);
  double sum = 0;
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 7; ++y) sum += t.at(x, y, 0);
  EXPECT_EQ(sum, 1.0);
  EXPECT_EQ(t.at(2, 3, 0), 1.0);
  EXPECT_EQ(t.at(4, 4, 1), 5.0);
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 7; ++y) EXPECT_EQ(t.at(x, y, 2), 0.0);
}

TEST(Encode, StackedSegmentsWriteOnce) {
  BoardState b = make_board(5, 5,
                            {{{{0, 0}, {0, 0}, {0, 0}}, 100, std::nullopt},
                             {{{4, 4}, {4, 4}, {4, 4}}, 100, std::nullopt}});
  const ObservationTensor t = encode(b, 1);
  EXPECT_EQ(t.at(0, 0, 1), 5.0);
  EXPECT_EQ(t.at(4, 4, 2), 5.0);
  double total = 0;
  for (double v : t.values) total += v;
  EXPECT_EQ(total, 10.0);
}

TEST(Encode, DeadSnakesContributeNothing) {
  BoardState b = fixture();
  b.snakes[2].alive = false;
  const ObservationTensor t = encode(b, 1);
  EXPECT_EQ(t.at(5, 2, 2), 0.0);
  EXPECT_EQ(t.at(5, 3, 2), 0.0);
  b.snakes[0].alive = false;
  const ObservationTensor own = encode(b, 1);
  for (int x = 0; x < 7; ++x)
    for (int y = 0; y < 7; ++y) EXPECT_EQ(own.at(x, y, 1), 0.0);
}

TEST(Encode, UnknownAgentIsContractViolation) {
  EXPECT_THROW(encode(fixture(), 4), ContractViolation);
  EXPECT_THROW(encode(fixture(), 0), ContractViolation);
  std::vector<double> small(10);
  EXPECT_THROW(encode_into(fixture(), 1, small), ContractViolation);
}

TEST(Encode, CustomHeadValue) {
  const ObservationTensor t = encode(fixture(), 2, 3.0);
  EXPECT_EQ(t.at(1, 4, 1), 3.0);
  EXPECT_EQ(t.at(1, 1, 2), 3.0);
}

TEST(EncodeProperties, InvariantsOverRandomBoards) {
  for (const BoardState& b : random_boards(10000)) {
    std::vector<ObservationTensor> obs;
    for (const auto& s : b.snakes) obs.push_back(encode(b, s.id));
    for (size_t i = 0; i < obs.size(); ++i) {
      const ObservationTensor& t = obs[i];
      const SnakeState& owner = b.snakes[i];
      double food_sum = 0;
      int own_heads = 0;
      for (int x = 0; x < b.width; ++x) {
        for (int y = 0; y < b.height; ++y) {
          const double f = t.at(x, y, 0);
          ASSERT_TRUE(f == 0.0 || f == 1.0);
          food_sum += f;
          for (int c = 1; c < 3; ++c) {
            const double v = t.at(x, y, c);
            ASSERT_TRUE(v == 0.0 || v == 1.0 || v == 5.0);
          }
          own_heads += t.at(x, y, 1) == 5.0 ? 1 : 0;
          // Channel 0 is the same for every agent.
          ASSERT_EQ(f, obs[0].at(x, y, 0));
        }
      }
      ASSERT_EQ(food_sum, static_cast<double>(b.food.size()));
      ASSERT_EQ(own_heads, owner.alive ? 1 : 0);

      // Unfolded body: length - 1 body cells in channel 1.
      std::set<Coord> cells(owner.body.begin(), owner.body.end());
      if (owner.alive && static_cast<int>(cells.size()) == owner.length()) {
        int ones = 0;
        for (int x = 0; x < b.width; ++x)
          for (int y = 0; y < b.height; ++y) ones += t.at(x, y, 1) == 1.0 ? 1 : 0;
        ASSERT_EQ(ones, owner.length() - 1);
      }
      // Head-marker symmetry between owner views.
      for (size_t j = 0; j < obs.size(); ++j) {
        if (i == j || !owner.alive || !b.snakes[j].alive) continue;
        const Coord h = owner.head();
        ASSERT_EQ(obs[j].at(h.x, h.y, 2), 5.0);
      }
      ASSERT_EQ(encode(b, owner.id), t);
    }
  }
}

}  // namespace
}  // namespace bsnake
