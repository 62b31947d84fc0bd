#include "bsnake/server.h"

#include <httplib.h>

#include <condition_variable>
#include <optional>
#include <thread>

namespace bsnake {

namespace {

uint64_t fnv1a(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

HttpReply error_reply(int status, const std::string& message) {
  return {status, Json{{"error", message}}.dump()};
}

std::string game_id_of(const Json& body) {
  auto game = body.find("game");
  if (game == body.end() || !game->is_object()) throw ParseError("game: missing");
  auto id = game->find("id");
  if (id == game->end() || !id->is_string()) throw ParseError("game.id: expected string");
  return id->get<std::string>();
}

// Result slot shared between a request and the worker computing its move.
struct MoveTask {
  std::mutex mutex;
  std::condition_variable cv;
  std::optional<Action> action;
  std::exception_ptr error;
  bool finished = false;
};

}  // namespace

struct SnakeServer::Impl {
  httplib::Server http;
  // Workers may outlive the request that started them when it times out;
  // the destructor waits for them.
  std::mutex worker_mutex;
  std::condition_variable worker_cv;
  int workers = 0;
  std::atomic<bool> ready{false};
};

void ServerConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port: must be in [0, 65535]");
  if (move_deadline_ms < 1) throw ConfigError("move_deadline_ms: must be >= 1");
  if (max_concurrency < 1) throw ConfigError("max_concurrency: must be >= 1");
}

Action decide_move(const Actor& actor, const WireBoardView& view) {
  uint64_t seed = fnv1a(view.game_id);
  seed = fnv1a(std::to_string(view.board.turn) + "/" + std::to_string(view.you), seed);
  Rng rng(seed);
  return actor.act(view.board, view.you, rng);
}

SnakeServer::SnakeServer(Actor actor, ServerConfig config, std::ostream* access_log)
    : actor_(std::make_shared<const Actor>(std::move(actor))),
      config_(std::move(config)),
      access_log_(access_log),
      impl_(std::make_unique<Impl>()) {
  config_.validate();
}

SnakeServer::~SnakeServer() {
  stop();
  std::unique_lock lock(impl_->worker_mutex);
  impl_->worker_cv.wait(lock, [&] { return impl_->workers == 0; });
}

void SnakeServer::set_move_hook(std::function<void()> hook) {
  std::lock_guard lock(hook_mutex_);
  move_hook_ = hook ? std::make_shared<std::function<void()>>(std::move(hook)) : nullptr;
}

int SnakeServer::active_sessions() const {
  std::lock_guard lock(session_mutex_);
  return static_cast<int>(sessions_.size());
}

void SnakeServer::log_line(const Json& record) {
  if (!access_log_) return;
  std::lock_guard lock(log_mutex_);
  *access_log_ << record.dump() << '\n' << std::flush;
}

HttpReply SnakeServer::handle(const std::string& method, const std::string& path,
                              const std::string& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Json log{{"ts_ms", now_ms()}, {"method", method}, {"path", path}};
  HttpReply reply;
  try {
    if (method == "GET" && path == "/") {
      reply = info();
    } else if (method == "POST" && (path == "/start" || path == "/move" || path == "/end")) {
      const Json j = Json::parse(body);
      if (!j.is_object()) throw ParseError("body: expected a JSON object");
      if (path == "/start") reply = start(j);
      if (path == "/move") reply = move(j, log);
      if (path == "/end") reply = end(j);
    } else {
      reply = error_reply(404, "no route for " + method + " " + path);
    }
  } catch (const Json::exception& e) {
    reply = error_reply(400, std::string("malformed JSON: ") + e.what());
  } catch (const ParseError& e) {
    reply = error_reply(400, e.what());
  } catch (const ConfigError& e) {
    reply = error_reply(400, e.what());
  }
  log["status"] = reply.status;
  log["latency_ms"] = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  if (reply.status >= 400) log["error"] = Json::parse(reply.body)["error"];
  log_line(log);
  return reply;
}

HttpReply SnakeServer::info() const {
  return {200, Json{{"apiversion", "1"},
                    {"author", config_.author},
                    {"color", config_.color},
                    {"head", config_.head},
                    {"tail", config_.tail}}
                   .dump()};
}

HttpReply SnakeServer::start(const Json& body) {
  const std::string id = game_id_of(body);
  std::lock_guard lock(session_mutex_);
  sessions_[id] = Session{};
  return {200, "{}"};
}

HttpReply SnakeServer::end(const Json& body) {
  const std::string id = game_id_of(body);
  Json record{{"event", "game_end"}, {"game_id", id}};
  {
    std::lock_guard lock(session_mutex_);
    auto it = sessions_.find(id);
    if (it != sessions_.end()) {
      record["moves"] = it->second.moves;
      record["last_turn"] = it->second.last_turn;
      sessions_.erase(it);
    }
  }
  if (auto turn = body.find("turn"); turn != body.end() && turn->is_number_integer()) {
    record["turn"] = *turn;
  }
  log_line(record);
  return {200, "{}"};
}

HttpReply SnakeServer::move(const Json& body, Json& log) {
  const WireBoardView view = decode_wire_state(parse_wire_state(body));
  actor_->check_board(view.board.width, view.board.height);
  log["game_id"] = view.game_id;
  log["turn"] = view.board.turn;

  auto task = std::make_shared<MoveTask>();
  std::shared_ptr<std::function<void()>> hook;
  {
    std::lock_guard lock(hook_mutex_);
    hook = move_hook_;
  }
  {
    std::lock_guard lock(impl_->worker_mutex);
    ++impl_->workers;
  }
  std::thread([task, hook, view, actor = actor_, impl = impl_.get()] {
    try {
      if (hook) (*hook)();
      const Action a = decide_move(*actor, view);
      std::lock_guard lock(task->mutex);
      task->action = a;
    } catch (...) {
      std::lock_guard lock(task->mutex);
      task->error = std::current_exception();
    }
    {
      std::lock_guard lock(task->mutex);
      task->finished = true;
    }
    task->cv.notify_all();
    std::lock_guard lock(impl->worker_mutex);
    --impl->workers;
    impl->worker_cv.notify_all();
  }).detach();

  std::optional<Action> chosen;
  bool late = false;
  {
    std::unique_lock lock(task->mutex);
    late = !task->cv.wait_for(lock, std::chrono::milliseconds(config_.move_deadline_ms),
                              [&] { return task->finished; });
    if (!late) {
      if (task->error) std::rethrow_exception(task->error);
      chosen = task->action;
    }
  }
  if (late) {
    ++deadline_misses_;
    chosen = actor_->fallback_action(view.board, view.you);
  }
  log["deadline_exceeded"] = late;
  log["move"] = action_name(*chosen);
  {
    std::lock_guard lock(session_mutex_);
    Session& s = sessions_[view.game_id];
    ++s.moves;
    s.last_turn = view.board.turn;
  }
  return {200, Json{{"move", action_name(*chosen)}}.dump()};
}

bool SnakeServer::listen() {
  auto& http = impl_->http;
  const int threads = config_.max_concurrency;
  http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpReply r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  http.Get("/", route);
  http.Post("/start", route);
  http.Post("/move", route);
  http.Post("/end", route);
  int port = config_.port;
  if (port == 0) {
    port = http.bind_to_any_port(config_.host);
    if (port < 0) return false;
  } else if (!http.bind_to_port(config_.host, port)) {
    return false;
  }
  bound_port_ = port;
  impl_->ready = true;
  const bool ok = http.listen_after_bind();
  impl_->ready = false;
  return ok;
}

bool SnakeServer::wait_until_ready(std::chrono::milliseconds timeout) const {
  const auto until = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < until) {
    if (impl_->ready && impl_->http.is_running()) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  return false;
}

void SnakeServer::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

}  // namespace bsnake
