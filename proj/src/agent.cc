#include "bsnake/agent.h"

#include <array>
#include <set>

namespace bsnake {

namespace {

constexpr std::array<std::string_view, 3> kKindNames = {"checkpoint_policy", "random", "scripted"};

}  // namespace

std::string_view agent_kind_name(AgentKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<AgentKind> parse_agent_kind(std::string_view name) {
  for (int i = 0; i < 3; ++i) {
    if (kKindNames[i] == name) return static_cast<AgentKind>(i);
  }
  return std::nullopt;
}

Json to_json(const AgentSpec& spec) {
  Json j{{"name", spec.name},
         {"kind", agent_kind_name(spec.kind)},
         {"heuristics", to_json(spec.heuristics)},
         {"greedy", spec.greedy},
         {"head_value", spec.head_value}};
  if (spec.kind == AgentKind::kCheckpointPolicy) j["checkpoint"] = spec.checkpoint;
  return j;
}

AgentSpec parse_agent_spec(const Json& j, const std::string& path) {
  json_fields::reject_unknown(j, path,
                              {"name", "kind", "checkpoint", "heuristics", "greedy", "head_value"});
  AgentSpec spec;
  std::string kind = "random";
  json_fields::read(j, path, "name", spec.name);
  json_fields::read(j, path, "kind", kind);
  json_fields::read(j, path, "checkpoint", spec.checkpoint);
  json_fields::read(j, path, "greedy", spec.greedy);
  json_fields::read(j, path, "head_value", spec.head_value);
  const auto parsed = parse_agent_kind(kind);
  if (!parsed) throw ConfigError(path + ".kind: unknown agent kind '" + kind + "'");
  spec.kind = *parsed;
  if (auto it = j.find("heuristics"); it != j.end()) {
    spec.heuristics = parse_heuristic_config(*it, path + ".heuristics");
  }
  spec.heuristics.validate();
  if (spec.kind == AgentKind::kCheckpointPolicy && spec.checkpoint.empty()) {
    throw ConfigError(path + ".checkpoint: required for checkpoint_policy agents");
  }
  return spec;
}

int sample_index(const ActionProbs& probabilities, Rng& rng) {
  double u = rng.uniform01();
  int last = -1;
  for (int k = 0; k < kNumActions; ++k) {
    if (probabilities[k] <= 0.0) continue;
    last = k;
    if (u < probabilities[k]) return k;
    u -= probabilities[k];
  }
  // Rounding left u just above the total mass.
  return last < 0 ? 0 : last;
}

Action scripted_action(const BoardState& board, AgentId agent_id) {
  const SnakeState& self = board.snake(agent_id);
  std::set<Coord> blocked;
  for (const auto& s : board.snakes) {
    if (!s.alive) continue;
    // A tail that is not stacked moves away this turn.
    const bool tail_moves = s.length() > 1 && s.body.back() != s.body[s.body.size() - 2];
    blocked.insert(s.body.begin(), tail_moves ? s.body.end() - 1 : s.body.end());
  }
  std::optional<Action> first_safe;
  std::array<bool, kNumActions> safe{};
  for (Action a : kAllActions) {
    const Coord n = step_towards(self.head(), a);
    safe[index_of(a)] = board.in_bounds(n) && !blocked.contains(n) &&
                        !(self.facing && a == opposite(*self.facing));
    if (safe[index_of(a)] && !first_safe) first_safe = a;
  }
  const RuleMask food = promote_food(board, agent_id, kMaxHealth + 1);
  if (food.preferred && safe[index_of(*food.preferred)]) return *food.preferred;
  if (first_safe) return *first_safe;
  return self.facing.value_or(Action::kUp);
}

Actor::Actor(AgentSpec spec) : spec_(std::move(spec)) {
  spec_.heuristics.validate();
  if (spec_.kind == AgentKind::kCheckpointPolicy) {
    try {
      params_ = std::make_shared<const PolicyParams>(load_checkpoint(spec_.checkpoint));
    } catch (const ParseError& e) {
      throw ConfigError("agent '" + spec_.name + "': " + e.what());
    }
  }
}

Actor::Actor(AgentSpec spec, std::shared_ptr<const PolicyParams> params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  spec_.heuristics.validate();
  if (!params_) throw ContractViolation("Actor: null parameters");
  spec_.kind = AgentKind::kCheckpointPolicy;
}

void Actor::check_board(int width, int height) const {
  if (!params_) return;
  const auto needed = static_cast<Eigen::Index>(observation_size(width, height));
  if (params_->input_dim() != needed) {
    throw ConfigError("agent '" + spec_.name + "': policy expects " +
                      std::to_string(params_->input_dim()) + " inputs but a " +
                      std::to_string(width) + "x" + std::to_string(height) + " board gives " +
                      std::to_string(needed));
  }
}

ActionProbs Actor::distribution(const BoardState& board, AgentId agent_id) const {
  ActionProbs probs{0.25, 0.25, 0.25, 0.25};
  if (spec_.kind == AgentKind::kScripted) {
    probs = {0, 0, 0, 0};
    probs[index_of(scripted_action(board, agent_id))] = 1.0;
    return probs;
  }
  if (params_) {
    const ObservationTensor obs = encode(board, agent_id, spec_.head_value);
    probs = policy_forward(*params_, obs.flat()).probabilities;
  }
  if (spec_.heuristics.uses_mode(HeuristicMode::kInTrainingMask)) {
    probs = apply_mask(probs, combined_mask(board, agent_id, spec_.heuristics,
                                            HeuristicMode::kInTrainingMask, kInferenceStep));
  }
  return probs;
}

Action Actor::act(const BoardState& board, AgentId agent_id, Rng& rng) const {
  const ActionProbs probs = distribution(board, agent_id);
  int k = 0;
  if (spec_.greedy || spec_.kind == AgentKind::kScripted) {
    for (int i = 1; i < kNumActions; ++i) {
      if (probs[i] > probs[k]) k = i;
    }
  } else {
    k = sample_index(probs, rng);
  }
  return overwrite_action(action_from_index(k), board, agent_id, spec_.heuristics, probs);
}

Action Actor::fallback_action(const BoardState& board, AgentId agent_id) const {
  std::vector<RuleMask> masks = {mask_walls(board, agent_id), mask_forbidden(board, agent_id)};
  for (const auto& [rule, mode] : spec_.heuristics.rules) {
    if (mode == HeuristicMode::kRewardShaping) continue;
    masks.push_back(rule_mask(rule, board, agent_id, spec_.heuristics));
  }
  const RuleMask mask = combine_masks(masks);
  if (mask.preferred) return *mask.preferred;
  for (Action a : kAllActions) {
    if (mask.is_valid(a)) return a;
  }
  return Action::kUp;
}

}  // namespace bsnake
