#include "bsnake/rewards.h"

namespace bsnake {

double base_reward(std::span<const TurnEvent> events, AgentId agent_id,
                   const RewardConfig& config) {
  bool died = false;
  bool won = false;
  bool survived = false;
  for (const auto& e : events) {
    if (e.agent_id != agent_id) continue;
    if (is_elimination(e.kind)) died = true;
    if (e.kind == EventKind::kWon) won = true;
    if (e.kind == EventKind::kSurvivedTurn) survived = true;
  }
  if (died) return config.death_penalty;
  if (won) return config.win_reward;
  if (survived) return config.survive_bonus;
  return 0.0;
}

double shaped_reward(double base, std::span<const TurnEvent> events, AgentId agent_id,
                     const RewardConfig& config) {
  if (config.shaping_terms.empty()) return base;
  double total = base;
  for (const auto& e : events) {
    if (e.agent_id != agent_id) continue;
    if (auto it = config.shaping_terms.find(e.kind); it != config.shaping_terms.end()) {
      total += it->second;
    }
  }
  return total;
}

}  // namespace bsnake
