#pragma once

// Independent PPO learners, one per snake, trained together in shared games.

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bsnake/config.h"
#include "bsnake/encoder.h"
#include "bsnake/policy.h"
#include "bsnake/ppo.h"

namespace bsnake {

struct TrainConfig {
  int iterations = 100;
  int64_t max_env_steps = 0;  // 0: no limit
  int n_envs = 8;             // games played side by side
  int max_episode_turns = 1000;
  int checkpoint_every = 0;  // iterations between checkpoints; 0: final only
  bool share_parameters = false;
  int hidden = kDefaultHidden;
  double head_value = kDefaultHeadValue;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct RunConfig {
  GameConfig game;
  RewardConfig reward;
  HeuristicConfig heuristics;
  PPOConfig ppo;
  TrainConfig train;
  uint64_t seed = 0;
  int parallelism = 1;

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

Json to_json(const TrainConfig& config);
TrainConfig parse_train_config(const Json& j, const std::string& path = "train");
Json to_json(const RunConfig& config);
// Missing sections take their defaults.
RunConfig parse_run_config(const Json& j);

struct AgentIterationStats {
  AgentId agent = 0;
  int samples = 0;
  double mean_reward = 0.0;
  int lives = 0;  // lives that ended during the iteration
  double mean_lifetime = 0.0;
  int max_lifetime = 0;
  LossDiagnostics loss;
  bool diverged = false;
};

struct IterationMetrics {
  int iteration = 0;
  int64_t env_steps = 0;  // cumulative
  int episodes = 0;       // completed during the iteration
  double mean_episode_length = 0.0;
  int max_episode_length = 0;
  std::map<EventKind, long> event_counts;
  std::vector<AgentIterationStats> agents;
};

// Includes per-episode rates of the events the heuristics target.
Json to_json(const IterationMetrics& metrics);

class Trainer {
 public:
  explicit Trainer(RunConfig config);
  ~Trainer();
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  // One rollout phase followed by one PPO update per policy.
  IterationMetrics iterate();
  bool done() const;

  const RunConfig& config() const { return config_; }
  int iteration() const { return iteration_; }
  int64_t env_steps() const { return env_steps_; }
  // Parameters acting for snake `agent_id`.
  const PolicyParams& policy_for(AgentId agent_id) const;
  std::vector<PolicyParams> policies() const;
  // Lengths of every completed episode so far, in completion order.
  const std::vector<int>& episode_lengths() const { return episode_lengths_; }

 private:
  struct Env;
  struct Rollout;

  int policy_index(AgentId agent_id) const;
  void collect(std::vector<Rollout>& rollouts, int turns);

  RunConfig config_;
  std::vector<PolicyParams> params_;
  std::vector<AdamState> adam_;
  std::vector<Rng> update_rng_;
  std::vector<Env> envs_;
  int iteration_ = 0;
  int64_t env_steps_ = 0;
  std::vector<int> episode_lengths_;
};

struct TrainOutputs {
  std::ostream* metrics = nullptr;  // JSON lines, one per iteration
  std::string checkpoint_dir;       // empty: no checkpoints
  std::function<void(const IterationMetrics&)> on_iteration;
};

struct TrainResult {
  std::vector<PolicyParams> policies;  // one per snake
  std::vector<IterationMetrics> metrics;
  std::vector<int> episode_lengths;
  int64_t env_steps = 0;
  std::vector<std::string> checkpoints;
};

// Checkpoints are named agent-<id>-iter-<n>.bin, plus agent-<id>.bin for the
// final parameters.
std::string checkpoint_name(AgentId agent_id, int iteration = -1);

TrainResult train(const RunConfig& config, const TrainOutputs& outputs = {});

}  // namespace bsnake
