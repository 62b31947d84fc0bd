#pragma once

// JSON codecs for the configuration types shared by training, the arena, the
// server and replays. Parsing is strict: unknown keys and wrong types raise
// ConfigError with the dotted path of the offending field.

#include <json.hpp>
#include <string>

#include "bsnake/engine.h"
#include "bsnake/heuristics.h"
#include "bsnake/ppo.h"
#include "bsnake/rewards.h"

namespace bsnake {

using Json = nlohmann::json;

Json to_json(const GameConfig& config);
Json to_json(const RewardConfig& config);
Json to_json(const HeuristicConfig& config);
Json to_json(const PPOConfig& config);

// `path` prefixes diagnostics, e.g. "game" -> "game.width: ...".
GameConfig parse_game_config(const Json& j, const std::string& path = "game");
RewardConfig parse_reward_config(const Json& j, const std::string& path = "reward");
HeuristicConfig parse_heuristic_config(const Json& j, const std::string& path = "heuristics");
PPOConfig parse_ppo_config(const Json& j, const std::string& path = "ppo");

Json read_json_file(const std::string& path);

namespace json_fields {

// Throws ConfigError if j has a key outside `allowed`.
void reject_unknown(const Json& j, const std::string& path,
                    std::initializer_list<std::string_view> allowed);
void require_object(const Json& j, const std::string& path);

template <typename T>
void read(const Json& j, const std::string& path, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const std::string field = path.empty() ? key : path + "." + key;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw ConfigError(field + ": expected boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) throw ConfigError(field + ": expected integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->is_number_integer() && !it->is_number_unsigned() && it->get<int64_t>() < 0) {
          throw ConfigError(field + ": expected non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError(field + ": expected number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw ConfigError(field + ": expected string");
    }
    out = it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

}  // namespace json_fields
}  // namespace bsnake
