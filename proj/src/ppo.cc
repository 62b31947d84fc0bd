#include "bsnake/ppo.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsnake {

void PPOConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("ppo.gamma: must be in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("ppo.lambda: must be in [0, 1]");
  if (!(clip_range > 0.0)) throw ConfigError("ppo.clip_range: must be > 0");
  if (!(learning_rate > 0.0)) throw ConfigError("ppo.learning_rate: must be > 0");
  if (horizon < 1) throw ConfigError("ppo.horizon: must be >= 1");
  if (epochs < 1) throw ConfigError("ppo.epochs: must be >= 1");
  if (minibatch_size < 1) throw ConfigError("ppo.minibatch_size: must be >= 1");
  if (!(entropy_coef >= 0.0)) throw ConfigError("ppo.entropy_coef: must be >= 0");
  if (!(value_coef >= 0.0)) throw ConfigError("ppo.value_coef: must be >= 0");
}

GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const int> dones, double gamma, double lambda) {
  const size_t n = rewards.size();
  if (values.size() != n + 1 || dones.size() != n) {
    throw ContractViolation("compute_gae: expected |values| = |rewards| + 1 = |dones| + 1");
  }
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double next_advantage = 0.0;
  for (size_t t = n; t-- > 0;) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * values[t + 1] * not_done - values[t];
    next_advantage = delta + gamma * lambda * not_done * next_advantage;
    out.advantages[t] = next_advantage;
    out.returns[t] = next_advantage + values[t];
  }
  return out;
}

void normalize_advantages(std::span<double> advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  const double mean = std::accumulate(advantages.begin(), advantages.end(), 0.0) / n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double stddev = std::max(std::sqrt(var / n), 1e-8);
  for (double& a : advantages) a = (a - mean) / stddev;
}

PPOBatch PPOBatch::select(std::span<const size_t> indices) const {
  PPOBatch out;
  out.observations.resize(observations.rows(), static_cast<Eigen::Index>(indices.size()));
  for (size_t j = 0; j < indices.size(); ++j) {
    const size_t i = indices[j];
    out.observations.col(static_cast<Eigen::Index>(j)) =
        observations.col(static_cast<Eigen::Index>(i));
    out.actions.push_back(actions[i]);
    out.old_log_probs.push_back(old_log_probs[i]);
    out.advantages.push_back(advantages[i]);
    out.returns.push_back(returns[i]);
    out.valid.push_back(valid[i]);
  }
  return out;
}

void PPOBatch::append(const PPOBatch& other) {
  if (other.size() == 0) return;
  if (size() == 0) {
    *this = other;
    return;
  }
  const Eigen::Index old_cols = observations.cols();
  observations.conservativeResize(Eigen::NoChange, old_cols + other.observations.cols());
  observations.rightCols(other.observations.cols()) = other.observations;
  actions.insert(actions.end(), other.actions.begin(), other.actions.end());
  old_log_probs.insert(old_log_probs.end(), other.old_log_probs.begin(), other.old_log_probs.end());
  advantages.insert(advantages.end(), other.advantages.begin(), other.advantages.end());
  returns.insert(returns.end(), other.returns.begin(), other.returns.end());
  valid.insert(valid.end(), other.valid.begin(), other.valid.end());
}

LossDiagnostics ppo_loss(const PolicyParams& params, const PPOBatch& batch,
                         const PPOConfig& config, PolicyParams* grad) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  if (n == 0) throw ContractViolation("ppo_loss: empty batch");
  const NetActivations pa = forward_batch(params, 0, batch.observations);
  const NetActivations va = forward_batch(params, 1, batch.observations);

  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd d_logits = Eigen::MatrixXd::Zero(kNumActions, n);
  Eigen::MatrixXd d_value(1, n);
  LossDiagnostics diag;
  int clipped = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::array<double, kNumActions> logits{};
    for (int k = 0; k < kNumActions; ++k) logits[k] = pa.out(k, i);
    const auto logp = masked_log_softmax(logits, batch.valid[i]);
    std::array<double, kNumActions> p{};
    double entropy = 0.0;
    for (int k = 0; k < kNumActions; ++k) {
      p[k] = std::isfinite(logp[k]) ? std::exp(logp[k]) : 0.0;
      if (p[k] > 0.0) entropy -= p[k] * logp[k];
    }
    const int a = batch.actions[i];
    const double adv = batch.advantages[i];
    const double ratio = std::exp(logp[a] - batch.old_log_probs[i]);
    const double clipped_ratio =
        std::clamp(ratio, 1.0 - config.clip_range, 1.0 + config.clip_range);
    const double unclipped_obj = ratio * adv;
    const double clipped_obj = clipped_ratio * adv;
    const bool use_unclipped = unclipped_obj <= clipped_obj;
    diag.policy_loss -= std::min(unclipped_obj, clipped_obj);
    if (std::abs(ratio - 1.0) > config.clip_range) ++clipped;
    diag.entropy += entropy;

    const double v = va.out(0, i);
    const double err = v - batch.returns[i];
    diag.value_loss += err * err;

    if (grad) {
      // d(-rho*A)/dz_k = -A * rho * (1[k=a] - p_k); zero on the clipped branch.
      const double d_ratio = use_unclipped ? -adv * inv_n : 0.0;
      for (int k = 0; k < kNumActions; ++k) {
        if (p[k] == 0.0) continue;
        const double indicator = k == a ? 1.0 : 0.0;
        double g = d_ratio * ratio * (indicator - p[k]);
        // -c_e * dH/dz_k with dH/dz_k = -p_k (log p_k + H).
        g += config.entropy_coef * inv_n * p[k] * (logp[k] + entropy);
        d_logits(k, i) = g;
      }
      d_value(0, i) = 2.0 * config.value_coef * err * inv_n;
    }
  }
  diag.policy_loss *= inv_n;
  diag.value_loss *= inv_n;
  diag.entropy *= inv_n;
  diag.clip_fraction = clipped * inv_n;
  diag.total = diag.policy_loss + config.value_coef * diag.value_loss -
               config.entropy_coef * diag.entropy;

  if (grad) {
    if (grad->size() != params.size()) *grad = PolicyParams(params.input_dim(), params.hidden());
    grad->data().setZero();
    backward_batch(params, 0, batch.observations, pa, d_logits, *grad);
    backward_batch(params, 1, batch.observations, va, d_value, *grad);
  }
  return diag;
}

void AdamState::apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
                      double learning_rate) {
  if (m.size() != params.size()) {
    m = Eigen::VectorXd::Zero(params.size());
    v = Eigen::VectorXd::Zero(params.size());
    step = 0;
  }
  ++step;
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  params.array() -= learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + epsilon);
}

UpdateDiagnostics ppo_update(PolicyParams& params, AdamState& adam, PPOBatch batch,
                             const PPOConfig& config, Rng& rng) {
  UpdateDiagnostics out;
  if (batch.size() == 0) return out;
  normalize_advantages(batch.advantages);

  const PolicyParams saved_params = params;
  const AdamState saved_adam = adam;
  PolicyParams grad(params.input_dim(), params.hidden());
  std::vector<size_t> order(batch.size());
  const size_t mb = static_cast<size_t>(config.minibatch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.uniform(i)]);
    }
    for (size_t start = 0; start < order.size(); start += mb) {
      const size_t stop = std::min(order.size(), start + mb);
      const PPOBatch minibatch =
          batch.select(std::span<const size_t>(order.data() + start, stop - start));
      const LossDiagnostics loss = ppo_loss(params, minibatch, config, &grad);
      if (!std::isfinite(loss.total) || !grad.data().allFinite()) {
        params = saved_params;
        adam = saved_adam;
        out.diverged = true;
        return out;
      }
      adam.apply(params.data(), grad.data(), config.learning_rate);
      out.loss.total += loss.total;
      out.loss.policy_loss += loss.policy_loss;
      out.loss.value_loss += loss.value_loss;
      out.loss.entropy += loss.entropy;
      out.loss.clip_fraction += loss.clip_fraction;
      ++out.minibatches;
    }
  }
  const double inv = 1.0 / out.minibatches;
  out.loss.total *= inv;
  out.loss.policy_loss *= inv;
  out.loss.value_loss *= inv;
  out.loss.entropy *= inv;
  out.loss.clip_fraction *= inv;
  return out;
}

}  // namespace bsnake
