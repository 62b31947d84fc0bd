#include "bsnake/encoder.h"

#include <algorithm>
#include <string>

namespace bsnake {

void encode_into(const BoardState& board, AgentId agent_id, std::span<double> out,
                 double head_value) {
  if (!board.has_snake(agent_id)) {
    throw ContractViolation("encode: unknown agent id " + std::to_string(agent_id));
  }
  if (out.size() != observation_size(board.width, board.height)) {
    throw ContractViolation("encode: output buffer has wrong size");
  }
  std::fill(out.begin(), out.end(), 0.0);
  const int h = board.height;
  for (Coord c : board.food) out[ObservationTensor::index(h, c.x, c.y, 0)] = 1.0;

  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    const int channel = s.id == agent_id ? 1 : 2;
    // Stacked segments write the same cell repeatedly; values never add up.
    for (Coord c : s.body) {
      if (board.in_bounds(c)) out[ObservationTensor::index(h, c.x, c.y, channel)] = 1.0;
    }
  }
  // Heads last so they override any body value on the same cell.
  for (const auto& s : board.snakes) {
    if (!s.alive || !board.in_bounds(s.head())) continue;
    const int channel = s.id == agent_id ? 1 : 2;
    out[ObservationTensor::index(h, s.head().x, s.head().y, channel)] = head_value;
  }
}

ObservationTensor encode(const BoardState& board, AgentId agent_id, double head_value) {
  ObservationTensor t;
  t.width = board.width;
  t.height = board.height;
  t.agent_id = agent_id;
  t.values.resize(observation_size(board.width, board.height));
  encode_into(board, agent_id, t.values, head_value);
  return t;
}

}  // namespace bsnake
