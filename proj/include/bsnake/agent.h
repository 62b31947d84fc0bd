#pragma once

// Acting agents for evaluation, the arena and the server: a policy (loaded
// checkpoint, uniform random, or a scripted baseline) wrapped with the
// heuristics it was configured with.

#include <memory>
#include <optional>
#include <string>

#include "bsnake/config.h"
#include "bsnake/encoder.h"
#include "bsnake/heuristics.h"
#include "bsnake/policy.h"

namespace bsnake {

enum class AgentKind { kCheckpointPolicy, kRandom, kScripted };

std::string_view agent_kind_name(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view name);

struct AgentSpec {
  std::string name;
  AgentKind kind = AgentKind::kRandom;
  std::string checkpoint;  // required for checkpoint_policy
  HeuristicConfig heuristics;
  bool greedy = false;  // argmax instead of sampling
  double head_value = kDefaultHeadValue;

  friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

Json to_json(const AgentSpec& spec);
AgentSpec parse_agent_spec(const Json& j, const std::string& path);

// Draws an index from a distribution by inverse CDF; entries with zero
// probability are never returned.
int sample_index(const ActionProbs& probabilities, Rng& rng);

// Scripted baseline: among moves that do not immediately hit a wall, a body
// or reverse, heads for the nearest food; otherwise the first safe move.
Action scripted_action(const BoardState& board, AgentId agent_id);

class Actor {
 public:
  // Loads the checkpoint for checkpoint_policy specs; ConfigError when it
  // cannot be loaded.
  explicit Actor(AgentSpec spec);
  // Policy actor around parameters already in memory.
  Actor(AgentSpec spec, std::shared_ptr<const PolicyParams> params);

  const AgentSpec& spec() const { return spec_; }
  const PolicyParams* params() const { return params_.get(); }

  // Throws ConfigError when the policy input size does not fit the board.
  void check_board(int width, int height) const;

  // Action distribution after in-training masks, before overwriting.
  ActionProbs distribution(const BoardState& board, AgentId agent_id) const;

  // Full pipeline: distribution, sample (or argmax), ad-hoc overwrite.
  Action act(const BoardState& board, AgentId agent_id, Rng& rng) const;

  // Action that needs no policy evaluation: the promoted action if any rule
  // prefers one, else the first action that passes the wall and forbidden
  // masks plus every configured mask. Used when there is no time to do more.
  Action fallback_action(const BoardState& board, AgentId agent_id) const;

 private:
  AgentSpec spec_;
  std::shared_ptr<const PolicyParams> params_;
};

}  // namespace bsnake
