#pragma once

#include <span>
#include <vector>

#include "bsnake/engine.h"

namespace bsnake {

inline constexpr int kObservationChannels = 3;
inline constexpr double kDefaultHeadValue = 5.0;

// Per-agent gridworld observation of shape width x height x 3.
//   channel 0: food
//   channel 1: the owner's body, head marked with head_value
//   channel 2: every other living snake, heads marked with head_value
// Storage is row-major [x][y][c].
struct ObservationTensor {
  int width = 0;
  int height = 0;
  AgentId agent_id = 0;
  std::vector<double> values;

  static size_t index(int height, int x, int y, int c) {
    return (static_cast<size_t>(x) * height + y) * kObservationChannels + c;
  }
  double at(int x, int y, int c) const { return values[index(height, x, y, c)]; }
  size_t size() const { return values.size(); }
  std::span<const double> flat() const { return values; }
  friend bool operator==(const ObservationTensor&, const ObservationTensor&) = default;
};

ObservationTensor encode(const BoardState& board, AgentId agent_id,
                         double head_value = kDefaultHeadValue);

// Writes into an existing buffer of size width*height*3 (no allocation).
void encode_into(const BoardState& board, AgentId agent_id, std::span<double> out,
                 double head_value = kDefaultHeadValue);

inline size_t observation_size(int width, int height) {
  return static_cast<size_t>(width) * height * kObservationChannels;
}

}  // namespace bsnake
