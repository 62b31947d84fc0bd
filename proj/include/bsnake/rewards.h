#pragma once

#include <map>
#include <span>

#include "bsnake/engine.h"

namespace bsnake {

struct RewardConfig {
  double survive_bonus = 0.002;
  double death_penalty = -1.0;
  double win_reward = 1.0;
  // Extra reward added whenever the agent is credited with an event of this
  // kind on the current turn.
  std::map<EventKind, double> shaping_terms;

  friend bool operator==(const RewardConfig&, const RewardConfig&) = default;
};

// Environment reward for one turn. Precedence: death > win > survive.
double base_reward(std::span<const TurnEvent> events, AgentId agent_id,
                   const RewardConfig& config = {});

double shaped_reward(double base, std::span<const TurnEvent> events, AgentId agent_id,
                     const RewardConfig& config);

// base_reward followed by shaped_reward.
inline double total_reward(std::span<const TurnEvent> events, AgentId agent_id,
                           const RewardConfig& config) {
  return shaped_reward(base_reward(events, agent_id, config), events, agent_id, config);
}

}  // namespace bsnake
