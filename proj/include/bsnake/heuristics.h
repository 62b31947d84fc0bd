#pragma once

// Human-engineered rules and the three ways of injecting them into an agent:
// masking the action distribution during training, overwriting the chosen
// action at inference, and adding event-based reward terms.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bsnake/engine.h"
#include "bsnake/rewards.h"

namespace bsnake {

enum class Rule : int { kWalls = 0, kForbidden = 1, kFood = 2, kKill = 3 };
inline constexpr std::array<Rule, 4> kAllRules = {Rule::kWalls, Rule::kForbidden, Rule::kFood,
                                                  Rule::kKill};

enum class HeuristicMode : int { kInTrainingMask = 0, kAdHocOverwrite, kRewardShaping };

std::string_view rule_name(Rule rule);  // "walls", "forbidden", "food", "kill"
std::optional<Rule> parse_rule(std::string_view name);
std::string_view mode_name(HeuristicMode mode);
std::optional<HeuristicMode> parse_mode(std::string_view name);

struct RuleProperties {
  bool prevention;        // false: promotion
  bool interacts_agents;  // false: environment
  std::string_view phase;
};
RuleProperties rule_properties(Rule rule);

struct RuleMask {
  std::array<int, kNumActions> valid = {1, 1, 1, 1};
  std::optional<Action> preferred;

  bool all_valid() const { return valid == std::array<int, kNumActions>{1, 1, 1, 1}; }
  bool none_valid() const { return valid == std::array<int, kNumActions>{0, 0, 0, 0}; }
  bool is_valid(Action a) const { return valid[index_of(a)] != 0; }
  friend bool operator==(const RuleMask&, const RuleMask&) = default;
};

using ActionProbs = std::array<double, kNumActions>;

struct HeuristicConfig {
  // Enabled rules and how each one is injected.
  std::map<Rule, HeuristicMode> rules;
  // The food rule fires while health < health_threshold.
  int health_threshold = 30;
  // Magnitude of generated reward terms; prevention rules get the negative.
  double shaping_magnitude = 0.4;
  // training step -> per-rule weight in [0, 1]. The weight in force at step s
  // comes from the greatest key <= s; rules without an entry weigh 1.
  std::map<int64_t, std::map<Rule, double>> schedule;

  void validate() const;
  bool enabled(Rule rule) const { return rules.contains(rule); }
  bool enabled(Rule rule, HeuristicMode mode) const {
    auto it = rules.find(rule);
    return it != rules.end() && it->second == mode;
  }
  bool uses_mode(HeuristicMode mode) const;
  double weight(Rule rule, int64_t step) const;

  friend bool operator==(const HeuristicConfig&, const HeuristicConfig&) = default;
};

// Step used at inference time: the final schedule entries are in force.
inline constexpr int64_t kInferenceStep = std::numeric_limits<int64_t>::max();

RuleMask mask_walls(const BoardState& board, AgentId agent_id);
RuleMask mask_forbidden(const BoardState& board, AgentId agent_id);
RuleMask promote_food(const BoardState& board, AgentId agent_id, int health_threshold);
RuleMask promote_kill(const BoardState& board, AgentId agent_id);

RuleMask rule_mask(Rule rule, const BoardState& board, AgentId agent_id,
                   const HeuristicConfig& config);

// Elementwise AND of the valid vectors; preferred is the first one (in list
// order) that survives the combined vector.
RuleMask combine_masks(std::span<const RuleMask> masks);

// Interpolates a mask towards all-ones by weight w: an entry stays masked
// only while valid*w + (1 - w) < 0.5; preferred survives only while w > 0.5.
RuleMask scale_mask(const RuleMask& mask, double weight);

// Combined mask of the rules enabled in `mode`, with schedule weights taken
// at `step`. All-ones when no such rule is enabled.
RuleMask combined_mask(const BoardState& board, AgentId agent_id, const HeuristicConfig& config,
                       HeuristicMode mode, int64_t step = kInferenceStep);

// Zeroes masked entries and renormalizes. An all-zero mask returns the input.
ActionProbs apply_mask(const ActionProbs& probabilities, const RuleMask& mask);

// Ad-hoc overwriting with the rules enabled in ad_hoc_overwrite mode.
// `probabilities` breaks ties when the policy action must be replaced;
// uniform when omitted.
Action overwrite_action(Action policy_action, const BoardState& board, AgentId agent_id,
                        const HeuristicConfig& config,
                        const std::optional<ActionProbs>& probabilities = std::nullopt);

// Reward terms for rules in reward_shaping mode, scaled by schedule weight.
// walls -> hit_wall, forbidden -> forbidden_move (negative);
// food -> ate_food, kill -> killed_other (positive).
std::map<EventKind, double> shaping_terms(const HeuristicConfig& config,
                                          int64_t step = kInferenceStep);

// RewardConfig with the heuristic terms added to its own shaping terms.
RewardConfig with_heuristic_shaping(const RewardConfig& reward, const HeuristicConfig& config,
                                    int64_t step = kInferenceStep);

}  // namespace bsnake
