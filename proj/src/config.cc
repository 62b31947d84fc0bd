#include "bsnake/config.h"

#include <fstream>
#include <sstream>

namespace bsnake {

namespace json_fields {

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected object");
}

void reject_unknown(const Json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  require_object(j, path);
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    if (!known) {
      throw ConfigError((path.empty() ? key : path + "." + key) + ": unknown field");
    }
  }
}

}  // namespace json_fields

using json_fields::read;
using json_fields::reject_unknown;

Json to_json(const GameConfig& c) {
  return Json{{"width", c.width},
              {"height", c.height},
              {"n_snakes", c.n_snakes},
              {"initial_length", c.initial_length},
              {"food_spawn_probability", c.food_spawn_probability},
              {"seed", c.seed}};
}

GameConfig parse_game_config(const Json& j, const std::string& path) {
  reject_unknown(j, path,
                 {"width", "height", "n_snakes", "initial_length", "food_spawn_probability", "seed"});
  GameConfig c;
  read(j, path, "width", c.width);
  read(j, path, "height", c.height);
  read(j, path, "n_snakes", c.n_snakes);
  read(j, path, "initial_length", c.initial_length);
  read(j, path, "food_spawn_probability", c.food_spawn_probability);
  read(j, path, "seed", c.seed);
  return c;
}

Json to_json(const RewardConfig& c) {
  Json terms = Json::object();
  for (const auto& [kind, value] : c.shaping_terms) terms[std::string(event_name(kind))] = value;
  return Json{{"survive_bonus", c.survive_bonus},
              {"death_penalty", c.death_penalty},
              {"win_reward", c.win_reward},
              {"shaping_terms", terms}};
}

RewardConfig parse_reward_config(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"survive_bonus", "death_penalty", "win_reward", "shaping_terms"});
  RewardConfig c;
  read(j, path, "survive_bonus", c.survive_bonus);
  read(j, path, "death_penalty", c.death_penalty);
  read(j, path, "win_reward", c.win_reward);
  if (auto it = j.find("shaping_terms"); it != j.end()) {
    const std::string field = path + ".shaping_terms";
    json_fields::require_object(*it, field);
    for (const auto& [key, value] : it->items()) {
      const auto kind = parse_event_kind(key);
      if (!kind) throw ConfigError(field + "." + key + ": unknown event kind");
      if (!value.is_number()) throw ConfigError(field + "." + key + ": expected number");
      c.shaping_terms[*kind] = value.get<double>();
    }
  }
  return c;
}

Json to_json(const HeuristicConfig& c) {
  Json rules = Json::object();
  for (const auto& [rule, mode] : c.rules) rules[std::string(rule_name(rule))] = mode_name(mode);
  Json schedule = Json::object();
  for (const auto& [step, weights] : c.schedule) {
    Json w = Json::object();
    for (const auto& [rule, value] : weights) w[std::string(rule_name(rule))] = value;
    schedule[std::to_string(step)] = w;
  }
  return Json{{"rules", rules},
              {"health_threshold", c.health_threshold},
              {"shaping_magnitude", c.shaping_magnitude},
              {"schedule", schedule}};
}

HeuristicConfig parse_heuristic_config(const Json& j, const std::string& path) {
  reject_unknown(j, path, {"rules", "health_threshold", "shaping_magnitude", "schedule"});
  HeuristicConfig c;
  read(j, path, "health_threshold", c.health_threshold);
  read(j, path, "shaping_magnitude", c.shaping_magnitude);
  if (auto it = j.find("rules"); it != j.end()) {
    const std::string field = path + ".rules";
    json_fields::require_object(*it, field);
    for (const auto& [key, value] : it->items()) {
      const auto rule = parse_rule(key);
      if (!rule) throw ConfigError(field + "." + key + ": unknown rule");
      if (!value.is_string()) throw ConfigError(field + "." + key + ": expected mode string");
      const auto mode = parse_mode(value.get<std::string>());
      if (!mode) {
        throw ConfigError(field + "." + key + ": unknown mode '" + value.get<std::string>() + "'");
      }
      c.rules[*rule] = *mode;
    }
  }
  if (auto it = j.find("schedule"); it != j.end()) {
    const std::string field = path + ".schedule";
    json_fields::require_object(*it, field);
    for (const auto& [key, weights] : it->items()) {
      int64_t step = 0;
      try {
        size_t used = 0;
        step = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError(field + "." + key + ": keys must be integer training steps");
      }
      json_fields::require_object(weights, field + "." + key);
      for (const auto& [rule_key, w] : weights.items()) {
        const auto rule = parse_rule(rule_key);
        if (!rule) throw ConfigError(field + "." + key + "." + rule_key + ": unknown rule");
        if (!w.is_number()) {
          throw ConfigError(field + "." + key + "." + rule_key + ": expected number");
        }
        c.schedule[step][*rule] = w.get<double>();
      }
    }
  }
  return c;
}

Json to_json(const PPOConfig& c) {
  return Json{{"gamma", c.gamma},
              {"lambda", c.lambda},
              {"clip_range", c.clip_range},
              {"learning_rate", c.learning_rate},
              {"horizon", c.horizon},
              {"epochs", c.epochs},
              {"minibatch_size", c.minibatch_size},
              {"entropy_coef", c.entropy_coef},
              {"value_coef", c.value_coef}};
}

PPOConfig parse_ppo_config(const Json& j, const std::string& path) {
  reject_unknown(j, path,
                 {"gamma", "lambda", "clip_range", "learning_rate", "horizon", "epochs",
                  "minibatch_size", "entropy_coef", "value_coef"});
  PPOConfig c;
  read(j, path, "gamma", c.gamma);
  read(j, path, "lambda", c.lambda);
  read(j, path, "clip_range", c.clip_range);
  read(j, path, "learning_rate", c.learning_rate);
  read(j, path, "horizon", c.horizon);
  read(j, path, "epochs", c.epochs);
  read(j, path, "minibatch_size", c.minibatch_size);
  read(j, path, "entropy_coef", c.entropy_coef);
  read(j, path, "value_coef", c.value_coef);
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace bsnake
