#include "bsnake/trainer.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

#include "bsnake/agent.h"
#include "bsnake/encoder.h"
#include "bsnake/heuristics.h"
#include "bsnake/parallel.h"
#include "bsnake/rewards.h"

namespace bsnake {

namespace {

// Environments are simulated in fixed blocks so that batch shapes, and with
// them every floating-point result, do not depend on the thread count.
constexpr int kEnvBlock = 4;

Json loss_to_json(const LossDiagnostics& d) {
  return Json{{"total", d.total},
              {"policy", d.policy_loss},
              {"value", d.value_loss},
              {"entropy", d.entropy},
              {"clip_fraction", d.clip_fraction}};
}

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw ConfigError("train.iterations: must be >= 1");
  if (max_env_steps < 0) throw ConfigError("train.max_env_steps: must be >= 0");
  if (n_envs < 1) throw ConfigError("train.n_envs: must be >= 1");
  if (max_episode_turns < 1) throw ConfigError("train.max_episode_turns: must be >= 1");
  if (checkpoint_every < 0) throw ConfigError("train.checkpoint_every: must be >= 0");
  if (hidden < 1) throw ConfigError("train.hidden: must be >= 1");
  if (!(head_value > 0.0)) throw ConfigError("train.head_value: must be > 0");
}

void RunConfig::validate() const {
  game.validate();
  heuristics.validate();
  ppo.validate();
  train.validate();
  if (parallelism < 1) throw ConfigError("parallelism: must be >= 1");
}

Json to_json(const TrainConfig& c) {
  return Json{{"iterations", c.iterations},
              {"max_env_steps", c.max_env_steps},
              {"n_envs", c.n_envs},
              {"max_episode_turns", c.max_episode_turns},
              {"checkpoint_every", c.checkpoint_every},
              {"share_parameters", c.share_parameters},
              {"hidden", c.hidden},
              {"head_value", c.head_value}};
}

TrainConfig parse_train_config(const Json& j, const std::string& path) {
  json_fields::reject_unknown(j, path,
                              {"iterations", "max_env_steps", "n_envs", "max_episode_turns",
                               "checkpoint_every", "share_parameters", "hidden", "head_value"});
  TrainConfig c;
  json_fields::read(j, path, "iterations", c.iterations);
  json_fields::read(j, path, "max_env_steps", c.max_env_steps);
  json_fields::read(j, path, "n_envs", c.n_envs);
  json_fields::read(j, path, "max_episode_turns", c.max_episode_turns);
  json_fields::read(j, path, "checkpoint_every", c.checkpoint_every);
  json_fields::read(j, path, "share_parameters", c.share_parameters);
  json_fields::read(j, path, "hidden", c.hidden);
  json_fields::read(j, path, "head_value", c.head_value);
  return c;
}

Json to_json(const RunConfig& c) {
  return Json{{"game", to_json(c.game)},       {"reward", to_json(c.reward)},
              {"heuristics", to_json(c.heuristics)}, {"ppo", to_json(c.ppo)},
              {"train", to_json(c.train)},     {"seed", c.seed},
              {"parallelism", c.parallelism}};
}

RunConfig parse_run_config(const Json& j) {
  json_fields::reject_unknown(j, "",
                              {"game", "reward", "heuristics", "ppo", "train", "seed", "parallelism"});
  RunConfig c;
  if (auto it = j.find("game"); it != j.end()) c.game = parse_game_config(*it, "game");
  if (auto it = j.find("reward"); it != j.end()) c.reward = parse_reward_config(*it, "reward");
  if (auto it = j.find("heuristics"); it != j.end()) {
    c.heuristics = parse_heuristic_config(*it, "heuristics");
  }
  if (auto it = j.find("ppo"); it != j.end()) c.ppo = parse_ppo_config(*it, "ppo");
  if (auto it = j.find("train"); it != j.end()) c.train = parse_train_config(*it, "train");
  json_fields::read(j, "", "seed", c.seed);
  json_fields::read(j, "", "parallelism", c.parallelism);
  return c;
}

Json to_json(const IterationMetrics& m) {
  Json events = Json::object();
  for (int k = 0; k < kNumEventKinds; ++k) {
    const auto kind = static_cast<EventKind>(k);
    auto it = m.event_counts.find(kind);
    events[std::string(event_name(kind))] = it == m.event_counts.end() ? 0 : it->second;
  }
  Json rates = Json::object();
  const double episodes = std::max(m.episodes, 1);
  for (auto kind : {EventKind::kHitWall, EventKind::kForbiddenMove, EventKind::kStarved,
                    EventKind::kKilledOther}) {
    const std::string name(event_name(kind));
    rates[name] = events[name].get<long>() / episodes;
  }
  Json agents = Json::array();
  for (const auto& a : m.agents) {
    agents.push_back(Json{{"agent", a.agent},
                          {"samples", a.samples},
                          {"mean_reward", a.mean_reward},
                          {"lifetime", Json{{"lives", a.lives},
                                            {"mean", a.mean_lifetime},
                                            {"max", a.max_lifetime}}},
                          {"loss", loss_to_json(a.loss)},
                          {"diverged", a.diverged}});
  }
  return Json{{"iteration", m.iteration},
              {"env_steps", m.env_steps},
              {"episodes", m.episodes},
              {"episode_length", Json{{"mean", m.mean_episode_length},
                                      {"max", m.max_episode_length}}},
              {"events", events},
              {"events_per_episode", rates},
              {"agents", agents}};
}

struct Trainer::Env {
  BoardState board;
  Rng rng;
};

// Everything one environment produced during one rollout phase.
struct Trainer::Rollout {
  struct Buffer {
    std::vector<double> obs;  // input_dim values per record
    std::vector<int> actions;
    std::vector<double> log_probs;
    std::vector<double> values;
    std::vector<double> rewards;
    std::vector<int> dones;
    std::vector<std::array<int, kNumActions>> valid;
    double bootstrap = 0.0;
    std::vector<int> lifetimes;
  };
  std::vector<Buffer> agents;
  std::vector<int> episode_lengths;
  std::map<EventKind, long> events;
};

Trainer::Trainer(RunConfig config) : config_(std::move(config)) {
  config_.validate();
  const int n_agents = config_.game.n_snakes;
  const int n_policies = config_.train.share_parameters ? 1 : n_agents;
  const int input_dim = static_cast<int>(observation_size(config_.game.width, config_.game.height));
  for (int q = 0; q < n_policies; ++q) {
    params_.push_back(PolicyParams::initialize(input_dim, Rng::derive(config_.seed, 100 + q),
                                               config_.train.hidden));
    adam_.emplace_back();
    update_rng_.emplace_back(Rng::derive(config_.seed, 200 + q));
  }
  for (int e = 0; e < config_.train.n_envs; ++e) {
    Env env;
    env.rng.reseed(Rng::derive(config_.seed, 1000 + e));
    GameConfig game = config_.game;
    game.seed = env.rng.next();
    env.board = init_game(game);
    envs_.push_back(std::move(env));
  }
}

Trainer::~Trainer() = default;

int Trainer::policy_index(AgentId agent_id) const {
  return config_.train.share_parameters ? 0 : agent_id - 1;
}

const PolicyParams& Trainer::policy_for(AgentId agent_id) const {
  if (agent_id < 1 || agent_id > config_.game.n_snakes) {
    throw ContractViolation("Trainer::policy_for: unknown agent " + std::to_string(agent_id));
  }
  return params_[policy_index(agent_id)];
}

std::vector<PolicyParams> Trainer::policies() const {
  std::vector<PolicyParams> out;
  for (AgentId a = 1; a <= config_.game.n_snakes; ++a) out.push_back(policy_for(a));
  return out;
}

bool Trainer::done() const {
  if (iteration_ >= config_.train.iterations) return true;
  const int64_t budget = config_.train.max_env_steps;
  return budget > 0 && budget - env_steps_ < config_.train.n_envs;
}

void Trainer::collect(std::vector<Rollout>& rollouts, int turns) {
  const int n_agents = config_.game.n_snakes;
  const int n_envs = static_cast<int>(envs_.size());
  const int d = params_[0].input_dim();
  const bool masking = config_.heuristics.uses_mode(HeuristicMode::kInTrainingMask);
  const int n_blocks = (n_envs + kEnvBlock - 1) / kEnvBlock;

  rollouts.assign(n_envs, {});
  for (auto& r : rollouts) r.agents.resize(n_agents);

  auto value_of = [&](AgentId a, const BoardState& board) {
    Eigen::MatrixXd x(d, 1);
    encode_into(board, a, std::span<double>(x.data(), d), config_.train.head_value);
    return forward_batch(params_[policy_index(a)], 1, x).out(0, 0);
  };

  parallel_for(n_blocks, config_.parallelism, [&](int block) {
    const int lo = block * kEnvBlock;
    const int hi = std::min(n_envs, lo + kEnvBlock);
    std::vector<JointAction> joint(hi - lo);
    std::vector<int> members;
    for (int t = 0; t < turns; ++t) {
      const int64_t step = env_steps_ + static_cast<int64_t>(t) * n_envs;
      const RewardConfig reward = with_heuristic_shaping(config_.reward, config_.heuristics, step);
      for (auto& j : joint) j.clear();

      for (AgentId a = 1; a <= n_agents; ++a) {
        members.clear();
        for (int e = lo; e < hi; ++e) {
          if (envs_[e].board.snake(a).alive) members.push_back(e);
        }
        if (members.empty()) continue;
        Eigen::MatrixXd x(d, static_cast<Eigen::Index>(members.size()));
        for (size_t c = 0; c < members.size(); ++c) {
          encode_into(envs_[members[c]].board, a,
                      std::span<double>(x.col(static_cast<Eigen::Index>(c)).data(), d),
                      config_.train.head_value);
        }
        const PolicyParams& p = params_[policy_index(a)];
        const NetActivations pol = forward_batch(p, 0, x);
        const NetActivations val = forward_batch(p, 1, x);
        for (size_t c = 0; c < members.size(); ++c) {
          const int e = members[c];
          const auto col = static_cast<Eigen::Index>(c);
          std::array<double, kNumActions> logits{};
          for (int k = 0; k < kNumActions; ++k) logits[k] = pol.out(k, col);
          std::array<int, kNumActions> valid = {1, 1, 1, 1};
          if (masking) {
            valid = combined_mask(envs_[e].board, a, config_.heuristics,
                                  HeuristicMode::kInTrainingMask, step)
                        .valid;
          }
          const auto logp = masked_log_softmax(logits, valid);
          ActionProbs probs{};
          for (int k = 0; k < kNumActions; ++k) probs[k] = std::exp(logp[k]);
          const int k = sample_index(probs, envs_[e].rng);

          Rollout::Buffer& buf = rollouts[e].agents[a - 1];
          buf.obs.insert(buf.obs.end(), x.col(col).data(), x.col(col).data() + d);
          buf.actions.push_back(k);
          buf.log_probs.push_back(logp[k]);
          buf.values.push_back(val.out(0, col));
          buf.valid.push_back(valid);
          joint[e - lo][a] = action_from_index(k);
        }
      }

      for (int e = lo; e < hi; ++e) {
        Env& env = envs_[e];
        Rollout& roll = rollouts[e];
        const auto events = step_in_place(env.board, joint[e - lo]);
        for (const auto& ev : events) roll.events[ev.kind]++;
        const bool terminal = is_terminal(env.board).has_value();
        const bool truncated = !terminal && env.board.turn >= config_.train.max_episode_turns;
        for (const auto& [a, action] : joint[e - lo]) {
          Rollout::Buffer& buf = roll.agents[a - 1];
          double r = total_reward(events, a, reward);
          const bool alive = env.board.snake(a).alive;
          if (truncated && alive) r += config_.ppo.gamma * value_of(a, env.board);
          buf.rewards.push_back(r);
          buf.dones.push_back(!alive || terminal || truncated ? 1 : 0);
          if (!alive || terminal || truncated) buf.lifetimes.push_back(env.board.turn);
        }
        if (terminal || truncated) {
          roll.episode_lengths.push_back(env.board.turn);
          GameConfig game = config_.game;
          game.seed = env.rng.next();
          env.board = init_game(game);
        }
      }
    }
    for (int e = lo; e < hi; ++e) {
      for (AgentId a = 1; a <= n_agents; ++a) {
        Rollout::Buffer& buf = rollouts[e].agents[a - 1];
        if (!buf.dones.empty() && !buf.dones.back()) buf.bootstrap = value_of(a, envs_[e].board);
      }
    }
  });
}

IterationMetrics Trainer::iterate() {
  if (done()) throw ContractViolation("Trainer::iterate: training is complete");
  const int n_agents = config_.game.n_snakes;
  const int n_envs = config_.train.n_envs;
  int turns = config_.ppo.horizon;
  if (config_.train.max_env_steps > 0) {
    turns = static_cast<int>(
        std::min<int64_t>(turns, (config_.train.max_env_steps - env_steps_) / n_envs));
  }

  std::vector<Rollout> rollouts;
  collect(rollouts, turns);
  env_steps_ += static_cast<int64_t>(turns) * n_envs;
  ++iteration_;

  IterationMetrics m;
  m.iteration = iteration_;
  m.env_steps = env_steps_;
  for (const auto& r : rollouts) {
    for (int len : r.episode_lengths) {
      episode_lengths_.push_back(len);
      m.mean_episode_length += len;
      m.max_episode_length = std::max(m.max_episode_length, len);
      ++m.episodes;
    }
    for (const auto& [kind, n] : r.events) m.event_counts[kind] += n;
  }
  if (m.episodes > 0) m.mean_episode_length /= m.episodes;

  // Per-policy batches in a fixed order: environment, then agent.
  const int n_policies = static_cast<int>(params_.size());
  const int d = params_[0].input_dim();
  std::vector<PPOBatch> batches(n_policies);
  m.agents.resize(n_agents);
  for (AgentId a = 1; a <= n_agents; ++a) m.agents[a - 1].agent = a;
  for (const auto& r : rollouts) {
    for (AgentId a = 1; a <= n_agents; ++a) {
      const Rollout::Buffer& buf = r.agents[a - 1];
      AgentIterationStats& stats = m.agents[a - 1];
      for (int life : buf.lifetimes) {
        stats.mean_lifetime += life;
        stats.max_lifetime = std::max(stats.max_lifetime, life);
        ++stats.lives;
      }
      const size_t n = buf.actions.size();
      if (n == 0) continue;
      std::vector<double> values = buf.values;
      values.push_back(buf.bootstrap);
      const GaeResult gae =
          compute_gae(buf.rewards, values, buf.dones, config_.ppo.gamma, config_.ppo.lambda);
      PPOBatch part;
      part.observations =
          Eigen::Map<const Eigen::MatrixXd>(buf.obs.data(), d, static_cast<Eigen::Index>(n));
      part.actions = buf.actions;
      part.old_log_probs = buf.log_probs;
      part.advantages = gae.advantages;
      part.returns = gae.returns;
      part.valid = buf.valid;
      batches[policy_index(a)].append(part);
      stats.samples += static_cast<int>(n);
      for (double rw : buf.rewards) stats.mean_reward += rw;
    }
  }
  for (auto& stats : m.agents) {
    if (stats.samples > 0) stats.mean_reward /= stats.samples;
    if (stats.lives > 0) stats.mean_lifetime /= stats.lives;
  }

  std::vector<UpdateDiagnostics> updates(n_policies);
  parallel_for(n_policies, config_.parallelism, [&](int q) {
    updates[q] = ppo_update(params_[q], adam_[q], std::move(batches[q]), config_.ppo,
                            update_rng_[q]);
  });
  for (AgentId a = 1; a <= n_agents; ++a) {
    m.agents[a - 1].loss = updates[policy_index(a)].loss;
    m.agents[a - 1].diverged = updates[policy_index(a)].diverged;
  }
  return m;
}

std::string checkpoint_name(AgentId agent_id, int iteration) {
  std::string name = "agent-" + std::to_string(agent_id);
  if (iteration >= 0) name += "-iter-" + std::to_string(iteration);
  return name + ".bin";
}

TrainResult train(const RunConfig& config, const TrainOutputs& outputs) {
  Trainer trainer(config);
  TrainResult result;
  namespace fs = std::filesystem;
  if (!outputs.checkpoint_dir.empty()) fs::create_directories(outputs.checkpoint_dir);
  auto save_all = [&](int iteration) {
    for (AgentId a = 1; a <= config.game.n_snakes; ++a) {
      const std::string path =
          (fs::path(outputs.checkpoint_dir) / checkpoint_name(a, iteration)).string();
      save_checkpoint(trainer.policy_for(a), path);
      result.checkpoints.push_back(path);
    }
  };
  while (!trainer.done()) {
    IterationMetrics m = trainer.iterate();
    if (outputs.metrics) *outputs.metrics << to_json(m).dump() << '\n' << std::flush;
    if (outputs.on_iteration) outputs.on_iteration(m);
    if (!outputs.checkpoint_dir.empty() && config.train.checkpoint_every > 0 &&
        m.iteration % config.train.checkpoint_every == 0) {
      save_all(m.iteration);
    }
    result.metrics.push_back(std::move(m));
  }
  if (!outputs.checkpoint_dir.empty()) save_all(-1);
  result.policies = trainer.policies();
  result.episode_lengths = trainer.episode_lengths();
  result.env_steps = trainer.env_steps();
  return result;
}

}  // namespace bsnake
