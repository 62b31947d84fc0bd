#pragma once

// HTTP webhook server speaking the public Battlesnake API (v1):
//   GET  /       snake metadata
//   POST /start  opens a session for a game id
//   POST /move   {"move": "up" | "down" | "left" | "right"}
//   POST /end    closes the session
// Every request is written to the access log as one JSON line.

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>

#include "bsnake/agent.h"
#include "bsnake/wire.h"

namespace bsnake {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8000;
  int move_deadline_ms = 400;
  int max_concurrency = 8;  // worker threads
  std::string author = "bsnake";
  std::string color = "#3e8e41";
  std::string head = "default";
  std::string tail = "default";

  void validate() const;
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON text
};

class SnakeServer {
 public:
  // `access_log` may be null; it must outlive the server.
  SnakeServer(Actor actor, ServerConfig config, std::ostream* access_log = nullptr);
  ~SnakeServer();
  SnakeServer(const SnakeServer&) = delete;
  SnakeServer& operator=(const SnakeServer&) = delete;

  // Request handling without a socket; listen() routes through here.
  HttpReply handle(const std::string& method, const std::string& path, const std::string& body);

  // Binds and serves until stop(). Returns false if the address cannot be
  // bound. port 0 picks a free port, reported by bound_port() once bound.
  bool listen();
  int bound_port() const { return bound_port_.load(); }
  bool wait_until_ready(std::chrono::milliseconds timeout) const;
  void stop();

  // Runs inside the move computation before the policy is evaluated; tests
  // use it to inject stalls.
  void set_move_hook(std::function<void()> hook);

  const ServerConfig& config() const { return config_; }
  int active_sessions() const;
  long deadline_misses() const { return deadline_misses_.load(); }

 private:
  struct Session {
    int moves = 0;
    int last_turn = 0;
  };
  struct Impl;

  HttpReply info() const;
  HttpReply start(const Json& body);
  HttpReply move(const Json& body, Json& log);
  HttpReply end(const Json& body);
  void log_line(const Json& record);

  std::shared_ptr<const Actor> actor_;
  ServerConfig config_;
  std::ostream* access_log_;
  std::mutex log_mutex_;
  mutable std::mutex session_mutex_;
  std::map<std::string, Session> sessions_;
  std::shared_ptr<std::function<void()>> move_hook_;
  std::mutex hook_mutex_;
  std::atomic<long> deadline_misses_{0};
  std::atomic<int> bound_port_{0};
  std::unique_ptr<Impl> impl_;
};

// The move for one request: policy (with the agent's in-training masks and
// ad-hoc overwrites) sampled with a generator seeded from the payload, so the
// answer depends on nothing but the request and the loaded agent.
Action decide_move(const Actor& actor, const WireBoardView& view);

}  // namespace bsnake
