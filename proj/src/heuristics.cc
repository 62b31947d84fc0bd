#include "bsnake/heuristics.h"

#include <algorithm>
#include <deque>
#include <string>

namespace bsnake {

namespace {

constexpr std::array<std::string_view, 4> kRuleNames = {"walls", "forbidden", "food", "kill"};
constexpr std::array<std::string_view, 3> kModeNames = {"in_training_mask", "ad_hoc_overwrite",
                                                        "reward_shaping"};

}  // namespace

std::string_view rule_name(Rule rule) { return kRuleNames[static_cast<int>(rule)]; }

std::optional<Rule> parse_rule(std::string_view name) {
  for (int i = 0; i < 4; ++i) {
    if (kRuleNames[i] == name) return static_cast<Rule>(i);
  }
  return std::nullopt;
}

std::string_view mode_name(HeuristicMode mode) { return kModeNames[static_cast<int>(mode)]; }

std::optional<HeuristicMode> parse_mode(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kModeNames[i] == name) return static_cast<HeuristicMode>(i);
  }
  return std::nullopt;
}

RuleProperties rule_properties(Rule rule) {
  switch (rule) {
    case Rule::kWalls: return {true, false, "early"};
    case Rule::kForbidden: return {true, false, "early"};
    case Rule::kFood: return {false, false, "middle"};
    case Rule::kKill: return {false, true, "late"};
  }
  return {true, false, "early"};
}

void HeuristicConfig::validate() const {
  if (health_threshold < 1 || health_threshold > 100) {
    throw ConfigError("heuristics.health_threshold: must be in [1, 100], got " +
                      std::to_string(health_threshold));
  }
  for (const auto& [rule, mode] : rules) {
    if (mode == HeuristicMode::kInTrainingMask && !rule_properties(rule).prevention) {
      throw ConfigError("heuristics.rules." + std::string(rule_name(rule)) +
                        ": promotion rules cannot be used as in_training_mask");
    }
  }
  for (const auto& [step, weights] : schedule) {
    if (step < 0) throw ConfigError("heuristics.schedule: negative training step");
    for (const auto& [rule, w] : weights) {
      if (!(w >= 0.0 && w <= 1.0)) {
        throw ConfigError("heuristics.schedule." + std::to_string(step) + "." +
                          std::string(rule_name(rule)) + ": weight must be in [0, 1]");
      }
    }
  }
}

bool HeuristicConfig::uses_mode(HeuristicMode mode) const {
  return std::any_of(rules.begin(), rules.end(), [&](const auto& kv) { return kv.second == mode; });
}

double HeuristicConfig::weight(Rule rule, int64_t step) const {
  double w = 1.0;
  for (const auto& [at, weights] : schedule) {
    if (at > step) break;
    if (auto it = weights.find(rule); it != weights.end()) w = it->second;
  }
  return w;
}

RuleMask mask_walls(const BoardState& board, AgentId agent_id) {
  const SnakeState& s = board.snake(agent_id);
  RuleMask mask;
  for (Action a : kAllActions) {
    mask.valid[index_of(a)] = board.in_bounds(step_towards(s.head(), a)) ? 1 : 0;
  }
  return mask;
}

RuleMask mask_forbidden(const BoardState& board, AgentId agent_id) {
  const SnakeState& s = board.snake(agent_id);
  RuleMask mask;
  if (s.facing) mask.valid[index_of(opposite(*s.facing))] = 0;
  return mask;
}

RuleMask promote_food(const BoardState& board, AgentId agent_id, int health_threshold) {
  const SnakeState& self = board.snake(agent_id);
  RuleMask mask;
  if (self.health >= health_threshold || board.food.empty()) return mask;

  const int w = board.width;
  std::vector<char> blocked(static_cast<size_t>(w * board.height), 0);
  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    for (Coord c : s.body) {
      if (board.in_bounds(c)) blocked[c.y * w + c.x] = 1;
    }
  }
  // Multi-source BFS outward from every food over free cells.
  std::vector<int> dist(blocked.size(), -1);
  std::deque<Coord> frontier;
  for (Coord f : board.food) {
    if (blocked[f.y * w + f.x]) continue;
    dist[f.y * w + f.x] = 0;
    frontier.push_back(f);
  }
  while (!frontier.empty()) {
    const Coord c = frontier.front();
    frontier.pop_front();
    for (Action a : kAllActions) {
      const Coord n = step_towards(c, a);
      if (!board.in_bounds(n) || blocked[n.y * w + n.x] || dist[n.y * w + n.x] >= 0) continue;
      dist[n.y * w + n.x] = dist[c.y * w + c.x] + 1;
      frontier.push_back(n);
    }
  }
  int best = -1;
  for (Action a : kAllActions) {
    const Coord n = step_towards(self.head(), a);
    if (!board.in_bounds(n)) continue;
    const int d = dist[n.y * w + n.x];
    if (d >= 0 && (best < 0 || d < best)) {
      best = d;
      mask.preferred = a;
    }
  }
  return mask;
}

RuleMask promote_kill(const BoardState& board, AgentId agent_id) {
  const SnakeState& self = board.snake(agent_id);
  RuleMask mask;
  for (Action a : kAllActions) {
    const Coord n = step_towards(self.head(), a);
    if (!board.in_bounds(n)) continue;
    for (const auto& enemy : board.snakes) {
      if (!enemy.alive || enemy.id == agent_id) continue;
      if (self.length() <= enemy.length()) continue;
      if (manhattan(self.head(), enemy.head()) != 2) continue;
      if (manhattan(n, enemy.head()) == 1) {
        mask.preferred = a;
        return mask;
      }
    }
  }
  return mask;
}

RuleMask rule_mask(Rule rule, const BoardState& board, AgentId agent_id,
                   const HeuristicConfig& config) {
  switch (rule) {
    case Rule::kWalls: return mask_walls(board, agent_id);
    case Rule::kForbidden: return mask_forbidden(board, agent_id);
    case Rule::kFood: return promote_food(board, agent_id, config.health_threshold);
    case Rule::kKill: return promote_kill(board, agent_id);
  }
  return {};
}

RuleMask combine_masks(std::span<const RuleMask> masks) {
  if (masks.empty()) throw ContractViolation("combine_masks: empty mask list");
  RuleMask out;
  for (const auto& m : masks) {
    for (int i = 0; i < kNumActions; ++i) out.valid[i] = out.valid[i] & m.valid[i];
  }
  for (const auto& m : masks) {
    if (m.preferred && out.is_valid(*m.preferred)) {
      out.preferred = m.preferred;
      break;
    }
  }
  return out;
}

RuleMask scale_mask(const RuleMask& mask, double weight) {
  RuleMask out;
  for (int i = 0; i < kNumActions; ++i) {
    const double effective = mask.valid[i] * weight + (1.0 - weight);
    out.valid[i] = effective >= 0.5 ? 1 : 0;
  }
  if (weight > 0.5 && mask.preferred && out.is_valid(*mask.preferred)) {
    out.preferred = mask.preferred;
  }
  return out;
}

RuleMask combined_mask(const BoardState& board, AgentId agent_id, const HeuristicConfig& config,
                       HeuristicMode mode, int64_t step) {
  std::vector<RuleMask> masks;
  for (const auto& [rule, rule_mode] : config.rules) {
    if (rule_mode != mode) continue;
    const double w = config.weight(rule, step);
    if (w == 0.0) continue;
    masks.push_back(scale_mask(rule_mask(rule, board, agent_id, config), w));
  }
  if (masks.empty()) return {};
  return combine_masks(masks);
}

ActionProbs apply_mask(const ActionProbs& probabilities, const RuleMask& mask) {
  if (mask.none_valid()) return probabilities;
  ActionProbs out{};
  double total = 0.0;
  int n_valid = 0;
  for (int i = 0; i < kNumActions; ++i) {
    if (mask.valid[i]) {
      out[i] = probabilities[i];
      total += probabilities[i];
      ++n_valid;
    }
  }
  if (total <= 0.0) {
    // The policy put no mass on any valid action; spread it evenly.
    for (int i = 0; i < kNumActions; ++i) out[i] = mask.valid[i] ? 1.0 / n_valid : 0.0;
    return out;
  }
  for (double& p : out) p /= total;
  return out;
}

Action overwrite_action(Action policy_action, const BoardState& board, AgentId agent_id,
                        const HeuristicConfig& config,
                        const std::optional<ActionProbs>& probabilities) {
  if (!config.uses_mode(HeuristicMode::kAdHocOverwrite)) return policy_action;
  const RuleMask mask =
      combined_mask(board, agent_id, config, HeuristicMode::kAdHocOverwrite, kInferenceStep);
  if (mask.preferred) return *mask.preferred;
  if (mask.is_valid(policy_action)) return policy_action;
  if (mask.none_valid()) return policy_action;
  const ActionProbs prior = probabilities.value_or(ActionProbs{0.25, 0.25, 0.25, 0.25});
  std::optional<Action> best;
  for (Action a : kAllActions) {
    if (!mask.is_valid(a)) continue;
    if (!best || prior[index_of(a)] > prior[index_of(*best)]) best = a;
  }
  return *best;
}

std::map<EventKind, double> shaping_terms(const HeuristicConfig& config, int64_t step) {
  std::map<EventKind, double> terms;
  for (const auto& [rule, mode] : config.rules) {
    if (mode != HeuristicMode::kRewardShaping) continue;
    const double w = config.weight(rule, step);
    if (w == 0.0) continue;
    const double magnitude = config.shaping_magnitude * w;
    switch (rule) {
      case Rule::kWalls: terms[EventKind::kHitWall] += -magnitude; break;
      case Rule::kForbidden: terms[EventKind::kForbiddenMove] += -magnitude; break;
      case Rule::kFood: terms[EventKind::kAteFood] += magnitude; break;
      case Rule::kKill: terms[EventKind::kKilledOther] += magnitude; break;
    }
  }
  return terms;
}

RewardConfig with_heuristic_shaping(const RewardConfig& reward, const HeuristicConfig& config,
                                    int64_t step) {
  RewardConfig out = reward;
  for (const auto& [kind, value] : shaping_terms(config, step)) out.shaping_terms[kind] += value;
  return out;
}

}  // namespace bsnake
