#pragma once

// Evaluation tournaments: free-for-all placement scoring and 1v1 round
// robins, plus event statistics recomputed from replays.

#include <optional>
#include <string>
#include <vector>

#include "bsnake/agent.h"
#include "bsnake/replay.h"

namespace bsnake {

struct ArenaConfig {
  GameConfig game;  // board and food settings; n_snakes is set per format
  std::vector<AgentSpec> agents;
  int ffa_games = 0;       // 0: skip the free-for-all
  int games_per_pair = 0;  // 0: skip the round robin
  uint64_t seed = 0;
  int max_turns = 1000;  // games still running are stopped and scored as ties
  int parallelism = 1;
  bool keep_replays = true;

  void validate() const;
};

Json to_json(const ArenaConfig& config);
ArenaConfig parse_arena_config(const Json& j);

struct EventRow {
  std::string agent;
  int games = 0;
  int deaths = 0;
  std::map<EventKind, long> counts;
  double mean_episode_length = 0.0;

  double per_game(EventKind kind) const;
  // Share of this agent's deaths caused by forbidden moves, in percent.
  double forbidden_death_pct() const;
  friend bool operator==(const EventRow&, const EventRow&) = default;
};

// Rows keyed by agent name: first the names in `agents` (all-zero when they
// never appear), then others in order of first appearance in the replays.
std::vector<EventRow> event_stats(const std::vector<Replay>& replays,
                                  const std::vector<std::string>& agents = {});

struct GameResult {
  Replay replay;
  std::vector<double> points;  // by seat
  int length = 0;
  bool truncated = false;
};

// Plays one game with actors[i] as snake i + 1. Placement points: the last
// survivor gets k, the next k - 1 and so on; snakes eliminated on the same
// turn (or still alive when the game is stopped) share the mean of the
// tied places.
GameResult play_game(const std::vector<const Actor*>& actors, GameConfig game, uint64_t seed,
                     int max_turns);

struct FfaResult {
  std::vector<std::string> agents;
  std::vector<std::vector<double>> points;  // [game][agent]
  std::vector<double> total;
  std::vector<double> mean;
  std::vector<double> stddev;  // sample standard deviation of per-game points
  int tied_games = 0;
  std::vector<EventRow> events;
  std::vector<int> lengths;
  std::vector<Replay> replays;
};

struct OneVsOneResult {
  std::vector<std::string> agents;
  // score[i][j]: points agent i took from agent j; empty on the diagonal.
  std::vector<std::vector<std::optional<double>>> score;
  int games = 0;
  std::vector<EventRow> events;
  std::vector<Replay> replays;
};

std::vector<Actor> make_actors(const ArenaConfig& config);

FfaResult run_ffa(const std::vector<Actor>& agents, int n_games, const ArenaConfig& config);
OneVsOneResult run_1v1(const std::vector<Actor>& agents, int games_per_pair,
                       const ArenaConfig& config);

Json to_json(const std::vector<EventRow>& rows);
Json to_json(const FfaResult& result);
Json to_json(const OneVsOneResult& result);
std::string format_event_table(const std::vector<EventRow>& rows);
std::string format_ffa_table(const FfaResult& result);
std::string format_1v1_table(const OneVsOneResult& result);

}  // namespace bsnake
