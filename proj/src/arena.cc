#include "bsnake/arena.h"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "bsnake/parallel.h"

namespace bsnake {

namespace {

std::string display_name(const AgentSpec& spec, size_t index) {
  return spec.name.empty() ? "agent-" + std::to_string(index + 1) : spec.name;
}

double mean_of_places(int first, int count) {
  // Mean of the integers first, first + 1, ..., first + count - 1.
  return first + (count - 1) / 2.0;
}

void validate_agents(const std::vector<AgentSpec>& agents) {
  if (agents.size() < 2) throw ConfigError("agents: at least two agents are required");
  std::set<std::string> names;
  for (size_t i = 0; i < agents.size(); ++i) {
    if (!names.insert(display_name(agents[i], i)).second) {
      throw ConfigError("agents[" + std::to_string(i) + "].name: duplicate name '" +
                        display_name(agents[i], i) + "'");
    }
    agents[i].heuristics.validate();
  }
}

}  // namespace

void ArenaConfig::validate() const {
  validate_agents(agents);
  if (ffa_games < 0) throw ConfigError("ffa.games: must be >= 0");
  if (games_per_pair < 0) throw ConfigError("one_vs_one.games_per_pair: must be >= 0");
  if (ffa_games == 0 && games_per_pair == 0) {
    throw ConfigError("arena: nothing to run; set ffa.games or one_vs_one.games_per_pair");
  }
  if (max_turns < 1) throw ConfigError("max_turns: must be >= 1");
  if (parallelism < 1) throw ConfigError("parallelism: must be >= 1");
  GameConfig g = game;
  if (ffa_games > 0) {
    g.n_snakes = static_cast<int>(agents.size());
    g.validate();
  }
  if (games_per_pair > 0) {
    g.n_snakes = 2;
    g.validate();
  }
}

Json to_json(const ArenaConfig& c) {
  Json agents = Json::array();
  for (const auto& a : c.agents) agents.push_back(to_json(a));
  return Json{{"game", to_json(c.game)},
              {"agents", agents},
              {"ffa", Json{{"games", c.ffa_games}}},
              {"one_vs_one", Json{{"games_per_pair", c.games_per_pair}}},
              {"seed", c.seed},
              {"max_turns", c.max_turns},
              {"parallelism", c.parallelism},
              {"keep_replays", c.keep_replays}};
}

ArenaConfig parse_arena_config(const Json& j) {
  json_fields::require_object(j, "arena");
  json_fields::reject_unknown(j, "",
                              {"game", "agents", "ffa", "one_vs_one", "seed", "max_turns",
                               "parallelism", "keep_replays"});
  ArenaConfig c;
  if (auto it = j.find("game"); it != j.end()) c.game = parse_game_config(*it, "game");
  auto agents = j.find("agents");
  if (agents == j.end() || !agents->is_array()) {
    throw ConfigError("agents: expected a list of agent specs");
  }
  for (size_t i = 0; i < agents->size(); ++i) {
    c.agents.push_back(parse_agent_spec((*agents)[i], "agents[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("ffa"); it != j.end()) {
    json_fields::reject_unknown(*it, "ffa", {"games"});
    json_fields::read(*it, "ffa", "games", c.ffa_games);
  }
  if (auto it = j.find("one_vs_one"); it != j.end()) {
    json_fields::reject_unknown(*it, "one_vs_one", {"games_per_pair"});
    json_fields::read(*it, "one_vs_one", "games_per_pair", c.games_per_pair);
  }
  json_fields::read(j, "", "seed", c.seed);
  json_fields::read(j, "", "max_turns", c.max_turns);
  json_fields::read(j, "", "parallelism", c.parallelism);
  json_fields::read(j, "", "keep_replays", c.keep_replays);
  return c;
}

double EventRow::per_game(EventKind kind) const {
  auto it = counts.find(kind);
  return games == 0 || it == counts.end() ? 0.0 : static_cast<double>(it->second) / games;
}

double EventRow::forbidden_death_pct() const {
  auto it = counts.find(EventKind::kForbiddenMove);
  if (deaths == 0 || it == counts.end()) return 0.0;
  return 100.0 * static_cast<double>(it->second) / deaths;
}

std::vector<EventRow> event_stats(const std::vector<Replay>& replays,
                                  const std::vector<std::string>& agents) {
  std::vector<EventRow> rows;
  std::map<std::string, size_t> index;
  for (const std::string& name : agents) {
    if (index.try_emplace(name, rows.size()).second) {
      rows.emplace_back();
      rows.back().agent = name;
    }
  }
  for (const Replay& replay : replays) {
    for (int id = 1; id <= replay.header.game.n_snakes; ++id) {
      const std::string name = replay.agent_name(id);
      auto [it, inserted] = index.try_emplace(name, rows.size());
      if (inserted) {
        rows.emplace_back();
        rows.back().agent = name;
      }
      EventRow& row = rows[it->second];
      ++row.games;
      row.mean_episode_length += replay.length();
      for (const ReplayTurn& turn : replay.turns) {
        for (const TurnEvent& e : turn.events) {
          if (e.agent_id != id) continue;
          row.counts[e.kind]++;
          if (is_elimination(e.kind)) ++row.deaths;
        }
      }
    }
  }
  for (EventRow& row : rows) {
    if (row.games > 0) row.mean_episode_length /= row.games;
  }
  return rows;
}

GameResult play_game(const std::vector<const Actor*>& actors, GameConfig game, uint64_t seed,
                     int max_turns) {
  const int k = static_cast<int>(actors.size());
  game.n_snakes = k;
  game.seed = Rng::derive(seed, 0);
  Rng rng(Rng::derive(seed, 1));
  BoardState board = init_game(game);
  std::vector<ReplayAgent> agents;
  for (int i = 0; i < k; ++i) {
    actors[i]->check_board(game.width, game.height);
    agents.push_back({i + 1, display_name(actors[i]->spec(), static_cast<size_t>(i)),
                      to_json(actors[i]->spec().heuristics)});
  }
  ReplayRecorder recorder(game, board, agents,
                          Json{{"seed", seed}, {"max_turns", max_turns}});

  GameResult result;
  result.points.assign(k, 0.0);
  int placed = 0;  // snakes already eliminated, i.e. places 1..placed are taken
  while (!is_terminal(board) && board.turn < max_turns) {
    JointAction joint;
    for (AgentId id : board.alive_ids()) joint[id] = actors[id - 1]->act(board, id, rng);
    const std::vector<AgentId> before = board.alive_ids();
    const auto events = step_in_place(board, joint);
    recorder.record(board, joint, events);
    std::vector<AgentId> fallen;
    for (AgentId id : before) {
      if (!board.snake(id).alive) fallen.push_back(id);
    }
    if (!fallen.empty()) {
      const double pts = mean_of_places(placed + 1, static_cast<int>(fallen.size()));
      for (AgentId id : fallen) result.points[id - 1] = pts;
      placed += static_cast<int>(fallen.size());
    }
  }
  const std::vector<AgentId> alive = board.alive_ids();
  if (!alive.empty()) {
    const double pts = mean_of_places(placed + 1, static_cast<int>(alive.size()));
    for (AgentId id : alive) result.points[id - 1] = pts;
  }
  result.truncated = !is_terminal(board).has_value();
  result.length = board.turn;
  result.replay = recorder.take();
  return result;
}

std::vector<Actor> make_actors(const ArenaConfig& config) {
  validate_agents(config.agents);
  std::vector<Actor> actors;
  for (size_t i = 0; i < config.agents.size(); ++i) {
    AgentSpec spec = config.agents[i];
    spec.name = display_name(spec, i);
    actors.emplace_back(std::move(spec));
    actors.back().check_board(config.game.width, config.game.height);
  }
  return actors;
}

FfaResult run_ffa(const std::vector<Actor>& agents, int n_games, const ArenaConfig& config) {
  if (agents.size() < 2) throw ConfigError("run_ffa: at least two agents are required");
  if (n_games < 1) throw ConfigError("run_ffa: n_games must be >= 1");
  std::vector<const Actor*> seats;
  for (const Actor& a : agents) {
    a.check_board(config.game.width, config.game.height);
    seats.push_back(&a);
  }
  std::vector<GameResult> games(n_games);
  parallel_for(n_games, config.parallelism, [&](int g) {
    games[g] = play_game(seats, config.game, Rng::derive(config.seed, static_cast<uint64_t>(g)),
                         config.max_turns);
  });

  const size_t k = agents.size();
  FfaResult r;
  for (size_t i = 0; i < k; ++i) r.agents.push_back(display_name(agents[i].spec(), i));
  r.total.assign(k, 0.0);
  for (GameResult& g : games) {
    std::set<double> distinct(g.points.begin(), g.points.end());
    if (distinct.size() < k) ++r.tied_games;
    for (size_t i = 0; i < k; ++i) r.total[i] += g.points[i];
    r.points.push_back(g.points);
    r.lengths.push_back(g.length);
    r.replays.push_back(std::move(g.replay));
  }
  for (size_t i = 0; i < k; ++i) {
    const double mean = r.total[i] / n_games;
    double ss = 0.0;
    for (const auto& p : r.points) ss += (p[i] - mean) * (p[i] - mean);
    r.mean.push_back(mean);
    r.stddev.push_back(n_games > 1 ? std::sqrt(ss / (n_games - 1)) : 0.0);
  }
  r.events = event_stats(r.replays, r.agents);
  if (!config.keep_replays) r.replays.clear();
  return r;
}

OneVsOneResult run_1v1(const std::vector<Actor>& agents, int games_per_pair,
                       const ArenaConfig& config) {
  if (agents.size() < 2) throw ConfigError("run_1v1: at least two agents are required");
  if (games_per_pair < 1) throw ConfigError("run_1v1: games_per_pair must be >= 1");
  for (const Actor& a : agents) a.check_board(config.game.width, config.game.height);

  struct Match {
    size_t first, second;  // agent indices; first sits as snake 1
  };
  std::vector<Match> matches;
  const size_t k = agents.size();
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = i + 1; j < k; ++j) {
      // Seats alternate so neither agent always spawns first.
      for (int g = 0; g < games_per_pair; ++g) {
        matches.push_back(g % 2 == 0 ? Match{i, j} : Match{j, i});
      }
    }
  }
  std::vector<GameResult> games(matches.size());
  parallel_for(static_cast<int>(matches.size()), config.parallelism, [&](int m) {
    const std::vector<const Actor*> seats = {&agents[matches[m].first],
                                             &agents[matches[m].second]};
    games[m] = play_game(seats, config.game,
                         Rng::derive(config.seed, 1'000'000 + static_cast<uint64_t>(m)),
                         config.max_turns);
  });

  OneVsOneResult r;
  for (size_t i = 0; i < k; ++i) r.agents.push_back(display_name(agents[i].spec(), i));
  r.score.assign(k, std::vector<std::optional<double>>(k));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      if (i != j) r.score[i][j] = 0.0;
    }
  }
  for (size_t m = 0; m < matches.size(); ++m) {
    const auto [a, b] = matches[m];
    // Two seats: placement points are 2/1 for a decision, 1.5 each for a tie.
    *r.score[a][b] += games[m].points[0] - 1.0;
    *r.score[b][a] += games[m].points[1] - 1.0;
    r.replays.push_back(std::move(games[m].replay));
  }
  r.games = static_cast<int>(matches.size());
  r.events = event_stats(r.replays, r.agents);
  if (!config.keep_replays) r.replays.clear();
  return r;
}

Json to_json(const std::vector<EventRow>& rows) {
  Json out = Json::array();
  for (const EventRow& row : rows) {
    Json counts = Json::object();
    for (int k = 0; k < kNumEventKinds; ++k) {
      const auto kind = static_cast<EventKind>(k);
      auto it = row.counts.find(kind);
      counts[std::string(event_name(kind))] = it == row.counts.end() ? 0 : it->second;
    }
    Json rates = Json::object();
    for (auto kind : {EventKind::kHitWall, EventKind::kForbiddenMove, EventKind::kStarved,
                      EventKind::kKilledOther}) {
      rates[std::string(event_name(kind))] = row.per_game(kind);
    }
    out.push_back(Json{{"agent", row.agent},
                       {"games", row.games},
                       {"deaths", row.deaths},
                       {"counts", counts},
                       {"per_game", rates},
                       {"forbidden_death_pct", row.forbidden_death_pct()},
                       {"mean_episode_length", row.mean_episode_length}});
  }
  return out;
}

Json to_json(const FfaResult& r) {
  Json agents = Json::array();
  for (size_t i = 0; i < r.agents.size(); ++i) {
    Json points = Json::array();
    for (const auto& g : r.points) points.push_back(g[i]);
    agents.push_back(Json{{"name", r.agents[i]},
                          {"total", r.total[i]},
                          {"mean", r.mean[i]},
                          {"stddev", r.stddev[i]},
                          {"points", points}});
  }
  return Json{{"format", "ffa"},
              {"games", r.points.size()},
              {"tied_games", r.tied_games},
              {"agents", agents},
              {"lengths", r.lengths},
              {"events", to_json(r.events)}};
}

Json to_json(const OneVsOneResult& r) {
  Json score = Json::array();
  for (const auto& row : r.score) {
    Json line = Json::array();
    for (const auto& cell : row) line.push_back(cell ? Json(*cell) : Json(nullptr));
    score.push_back(line);
  }
  return Json{{"format", "1v1"},
              {"games", r.games},
              {"agents", r.agents},
              {"score", score},
              {"events", to_json(r.events)}};
}

std::string format_event_table(const std::vector<EventRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "agent" << std::right << std::setw(7) << "games"
      << std::setw(9) << "hit_wall" << std::setw(11) << "forbidden" << std::setw(9) << "starved"
      << std::setw(8) << "kills" << std::setw(12) << "%forb.death" << std::setw(10) << "mean_len"
      << '\n';
  out << std::fixed;
  for (const EventRow& row : rows) {
    auto count = [&](EventKind k) {
      auto it = row.counts.find(k);
      return it == row.counts.end() ? 0L : it->second;
    };
    out << std::left << std::setw(20) << row.agent << std::right << std::setw(7) << row.games
        << std::setw(9) << count(EventKind::kHitWall) << std::setw(11)
        << count(EventKind::kForbiddenMove) << std::setw(9) << count(EventKind::kStarved)
        << std::setw(8) << count(EventKind::kKilledOther) << std::setw(11) << std::setprecision(1)
        << row.forbidden_death_pct() << '%' << std::setw(10) << std::setprecision(2)
        << row.mean_episode_length << '\n';
  }
  return out.str();
}

std::string format_ffa_table(const FfaResult& r) {
  std::ostringstream out;
  out << "free-for-all, " << r.points.size() << " games (" << r.tied_games
      << " with tied places)\n";
  out << std::left << std::setw(20) << "agent" << std::right << std::setw(9) << "total"
      << std::setw(9) << "mean" << std::setw(9) << "std" << '\n';
  out << std::fixed << std::setprecision(3);
  for (size_t i = 0; i < r.agents.size(); ++i) {
    out << std::left << std::setw(20) << r.agents[i] << std::right << std::setw(9)
        << std::setprecision(1) << r.total[i] << std::setw(9) << std::setprecision(3) << r.mean[i]
        << std::setw(9) << r.stddev[i] << '\n';
  }
  out << "(std: per-game sample standard deviation)\n\n" << format_event_table(r.events);
  return out.str();
}

std::string format_1v1_table(const OneVsOneResult& r) {
  std::ostringstream out;
  out << "one-vs-one, " << r.games << " games; row agent's points against column agent\n";
  out << std::left << std::setw(20) << "" << std::right;
  for (const auto& name : r.agents) out << std::setw(14) << name.substr(0, 13);
  out << '\n' << std::fixed << std::setprecision(1);
  for (size_t i = 0; i < r.agents.size(); ++i) {
    out << std::left << std::setw(20) << r.agents[i] << std::right;
    for (const auto& cell : r.score[i]) {
      if (cell) {
        out << std::setw(14) << *cell;
      } else {
        out << std::setw(14) << "-";
      }
    }
    out << '\n';
  }
  out << '\n' << format_event_table(r.events);
  return out.str();
}

}  // namespace bsnake
