#include "bsnake/cli.h"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <thread>

#include "bsnake/arena.h"
#include "bsnake/replay.h"
#include "bsnake/server.h"
#include "bsnake/trainer.h"

namespace bsnake {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::optional<int> parallelism;
  std::vector<std::string> overrides;
};

void add_run_options(CLI::App* cmd, GlobalOptions& g, const std::string& default_out) {
  cmd->add_option("-c,--config", g.config, "JSON config file, or a manifest from an earlier run")
      ->envname("BSNAKE_CONFIG");
  cmd->add_option("--seed", g.seed, "Run seed (overrides the config)")->envname("BSNAKE_SEED");
  g.out = default_out;
  cmd->add_option("-o,--out", g.out, "Output directory")->envname("BSNAKE_OUT")
      ->capture_default_str();
  cmd->add_option("-j,--parallelism", g.parallelism, "Worker threads")
      ->envname("BSNAKE_PARALLELISM");
  cmd->add_option("--set", g.overrides, "Config override, e.g. --set ppo.learning_rate=1e-4");
}

Json resolved_config(const GlobalOptions& g) {
  Json cfg = g.config.empty() ? Json::object() : load_config_or_manifest(g.config);
  for (const auto& o : g.overrides) apply_override(cfg, o);
  if (g.seed) cfg["seed"] = *g.seed;
  if (g.parallelism) cfg["parallelism"] = *g.parallelism;
  return cfg;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path.string() + ": cannot write");
  out << j.dump(2) << '\n';
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

Json manifest(const std::string& command, const Json& config, uint64_t seed, Json artifacts) {
  return Json{{"tool", "bsnake"},
              {"version", kToolVersion},
              {"command", command},
              {"seed", seed},
              {"config", config},
              {"artifacts", std::move(artifacts)}};
}

int cmd_train(const GlobalOptions& g, std::ostream& out) {
  RunConfig rc = parse_run_config(resolved_config(g));
  rc.validate();
  const fs::path dir = prepare_out_dir(g.out);
  fs::create_directories(dir / "checkpoints");
  write_json(dir / "manifest.json",
             manifest("train", to_json(rc), rc.seed,
                      Json{{"metrics", "metrics.jsonl"},
                           {"checkpoints", "checkpoints/"},
                           {"report", "report.json"}}));
  out << "seed " << rc.seed << ", writing to " << dir.string() << '\n';

  std::ofstream metrics(dir / "metrics.jsonl");
  TrainOutputs outputs;
  outputs.metrics = &metrics;
  outputs.checkpoint_dir = (dir / "checkpoints").string();
  outputs.on_iteration = [&](const IterationMetrics& m) {
    out << "iter " << m.iteration << "  steps " << m.env_steps << "  episodes " << m.episodes
        << "  mean_len " << std::fixed << std::setprecision(1) << m.mean_episode_length << '\n';
  };
  const TrainResult r = train(rc, outputs);

  Json checkpoints = Json::array();
  for (const auto& p : r.checkpoints) {
    checkpoints.push_back(fs::relative(p, dir).generic_string());
  }
  double mean_len = 0;
  for (int len : r.episode_lengths) mean_len += len;
  if (!r.episode_lengths.empty()) mean_len /= r.episode_lengths.size();
  write_json(dir / "report.json", Json{{"seed", rc.seed},
                                       {"iterations", r.metrics.size()},
                                       {"env_steps", r.env_steps},
                                       {"episodes", r.episode_lengths.size()},
                                       {"mean_episode_length", mean_len},
                                       {"checkpoints", checkpoints}});
  return kExitOk;
}

void write_replays(const fs::path& dir, const std::string& prefix,
                   const std::vector<Replay>& replays) {
  for (size_t i = 0; i < replays.size(); ++i) {
    std::ostringstream name;
    name << prefix << '-' << std::setw(4) << std::setfill('0') << i + 1 << ".jsonl";
    write_replay_file(replays[i], (dir / name.str()).string());
  }
}

int cmd_arena(const GlobalOptions& g, std::ostream& out) {
  Json cfg = resolved_config(g);
  // Checkpoint paths in a config file are relative to that file.
  if (!g.config.empty() && cfg.contains("agents") && cfg["agents"].is_array()) {
    const fs::path base = fs::path(g.config).parent_path();
    for (auto& a : cfg["agents"]) {
      if (a.is_object() && a.contains("checkpoint") && a["checkpoint"].is_string()) {
        const fs::path p(a["checkpoint"].get<std::string>());
        if (p.is_relative() && !base.empty()) a["checkpoint"] = (base / p).lexically_normal();
      }
    }
  }
  const ArenaConfig ac = parse_arena_config(cfg);
  ac.validate();
  const std::vector<Actor> actors = make_actors(ac);

  const fs::path dir = prepare_out_dir(g.out);
  fs::create_directories(dir / "replays");
  write_json(dir / "manifest.json",
             manifest("arena", to_json(ac), ac.seed,
                      Json{{"replays", "replays/"}, {"report", "report.json"}}));
  out << "seed " << ac.seed << ", writing to " << dir.string() << '\n';

  Json report{{"seed", ac.seed}};
  if (ac.ffa_games > 0) {
    const FfaResult r = run_ffa(actors, ac.ffa_games, ac);
    report["ffa"] = to_json(r);
    write_replays(dir / "replays", "ffa", r.replays);
    out << '\n' << format_ffa_table(r);
  }
  if (ac.games_per_pair > 0) {
    const OneVsOneResult r = run_1v1(actors, ac.games_per_pair, ac);
    report["one_vs_one"] = to_json(r);
    write_replays(dir / "replays", "1v1", r.replays);
    out << '\n' << format_1v1_table(r);
  }
  write_json(dir / "report.json", report);
  return kExitOk;
}

std::vector<std::string> expand_replay_paths(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".jsonl") {
          found.push_back(e.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

int cmd_replay(const std::vector<std::string>& paths, bool stats, std::optional<int> turn,
               std::ostream& out) {
  std::vector<Replay> replays;
  for (const auto& f : expand_replay_paths(paths)) replays.push_back(read_replay_file(f));
  if (replays.empty()) throw ConfigError("replay: no replay files found");
  if (stats) {
    out << format_event_table(event_stats(replays));
    return kExitOk;
  }
  for (const Replay& r : replays) {
    if (turn) {
      if (*turn < 0 || *turn > r.length()) {
        throw ConfigError("--turn: " + std::to_string(*turn) + " outside [0, " +
                          std::to_string(r.length()) + "]");
      }
      out << "turn " << *turn << '\n' << render_ascii(board_from_replay(r, *turn)) << '\n';
      continue;
    }
    for (int t = 1; t <= r.length(); ++t) {
      out << "turn " << t << '\n' << render_ascii(board_from_replay(r, t)) << '\n';
    }
  }
  return kExitOk;
}

struct ServeOptions {
  std::string checkpoint;
  std::string agent_file;
  std::string heuristics_file;
  bool greedy = false;
  std::string access_log;
  std::optional<uint64_t> seed;
  ServerConfig server;
};

SnakeServer* g_running_server = nullptr;

void stop_on_signal(int) {
  if (g_running_server) g_running_server->stop();
}

int cmd_serve(const ServeOptions& o, std::ostream& out) {
  AgentSpec spec;
  if (!o.agent_file.empty()) {
    spec = parse_agent_spec(read_json_file(o.agent_file), o.agent_file);
  } else if (!o.checkpoint.empty()) {
    spec.kind = AgentKind::kCheckpointPolicy;
    spec.checkpoint = o.checkpoint;
  } else {
    throw ConfigError("serve: --checkpoint or --agent is required");
  }
  if (!o.heuristics_file.empty()) {
    spec.heuristics = parse_heuristic_config(read_json_file(o.heuristics_file), "heuristics");
  }
  if (o.greedy) spec.greedy = true;
  if (spec.name.empty()) spec.name = "bsnake";
  o.server.validate();

  std::ofstream log_file;
  std::ostream* log = nullptr;
  if (!o.access_log.empty()) {
    log_file.open(o.access_log, std::ios::app);
    if (!log_file) throw ConfigError("--access-log: cannot open " + o.access_log);
    log = &log_file;
  }
  SnakeServer server(Actor(spec), o.server, log);
  g_running_server = &server;
  std::signal(SIGINT, stop_on_signal);
  std::signal(SIGTERM, stop_on_signal);
  std::thread announce([&] {
    if (server.wait_until_ready(std::chrono::seconds(10))) {
      out << "serving '" << spec.name << "' on " << o.server.host << ':' << server.bound_port()
          << " (move deadline " << o.server.move_deadline_ms << " ms, seed "
          << o.seed.value_or(0) << ")" << std::endl;
    }
  });
  const bool ok = server.listen();
  announce.join();
  g_running_server = nullptr;
  if (!ok) {
    throw std::runtime_error("serve: cannot bind " + o.server.host + ":" +
                             std::to_string(o.server.port));
  }
  return kExitOk;
}

}  // namespace

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set " + assignment + ": expected path=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &config;
  size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw ConfigError("--set " + assignment + ": empty path component");
    if (!node->is_object()) {
      throw ConfigError("--set " + assignment + ": '" + path.substr(0, start) +
                        "' is not an object");
    }
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key)) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

Json load_config_or_manifest(const std::string& path) {
  Json j = read_json_file(path);
  if (j.is_object() && j.value("tool", "") == "bsnake" && j.contains("config")) {
    return j["config"];
  }
  return j;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent Battlesnake training, evaluation and serving", "bsnake"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GlobalOptions train_opts, arena_opts;
  CLI::App* train_cmd = app.add_subcommand("train", "Train one PPO learner per snake");
  add_run_options(train_cmd, train_opts, "runs/train");
  CLI::App* arena_cmd = app.add_subcommand("arena", "Run free-for-all and 1v1 tournaments");
  add_run_options(arena_cmd, arena_opts, "runs/arena");

  std::vector<std::string> replay_paths;
  bool stats = false;
  std::optional<int> turn;
  CLI::App* replay_cmd = app.add_subcommand("replay", "Print replay frames or event statistics");
  replay_cmd->add_option("paths", replay_paths, "Replay files or directories of .jsonl files")
      ->required();
  replay_cmd->add_flag("--stats", stats, "Print the per-agent event table instead of frames");
  replay_cmd->add_option("--turn", turn, "Print only the board after this turn (0: initial)");

  ServeOptions serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "Serve an agent over the webhook API");
  serve_cmd->add_option("--checkpoint", serve.checkpoint, "Policy checkpoint")
      ->envname("BSNAKE_CHECKPOINT");
  serve_cmd->add_option("--agent", serve.agent_file, "Agent spec JSON (instead of --checkpoint)")
      ->envname("BSNAKE_AGENT");
  serve_cmd->add_option("--heuristics", serve.heuristics_file, "Heuristic config JSON")
      ->envname("BSNAKE_HEURISTICS");
  serve_cmd->add_flag("--greedy", serve.greedy, "Take the most likely move instead of sampling");
  serve_cmd->add_option("--host", serve.server.host)->envname("BSNAKE_HOST")->capture_default_str();
  serve_cmd->add_option("--port", serve.server.port)->envname("BSNAKE_PORT")->capture_default_str();
  serve_cmd->add_option("--move-deadline-ms", serve.server.move_deadline_ms)
      ->envname("BSNAKE_MOVE_DEADLINE_MS")
      ->capture_default_str();
  serve_cmd->add_option("--max-concurrency", serve.server.max_concurrency)
      ->envname("BSNAKE_MAX_CONCURRENCY")
      ->capture_default_str();
  serve_cmd->add_option("--access-log", serve.access_log, "JSON-lines access log file")
      ->envname("BSNAKE_ACCESS_LOG");
  serve_cmd->add_option("--author", serve.server.author)->envname("BSNAKE_AUTHOR");
  serve_cmd->add_option("--color", serve.server.color)->envname("BSNAKE_COLOR");
  serve_cmd->add_option("--head", serve.server.head)->envname("BSNAKE_HEAD");
  serve_cmd->add_option("--tail", serve.server.tail)->envname("BSNAKE_TAIL");
  serve_cmd->add_option("--seed", serve.seed, "Reported only; moves are seeded per request")
      ->envname("BSNAKE_SEED");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_opts, out);
    if (*arena_cmd) return cmd_arena(arena_opts, out);
    if (*replay_cmd) return cmd_replay(replay_paths, stats, turn, out);
    if (*serve_cmd) return cmd_serve(serve, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace bsnake
