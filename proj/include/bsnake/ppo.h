#pragma once

// Proximal policy optimization with a clipped surrogate, generalized
// advantage estimation and an Adam optimizer.

#include <Eigen/Dense>
#include <array>
#include <span>
#include <vector>

#include "bsnake/policy.h"

namespace bsnake {

struct PPOConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_range = 0.2;
  double learning_rate = 3e-4;
  int horizon = 512;  // engine turns collected per environment per iteration
  int epochs = 4;
  int minibatch_size = 128;
  double entropy_coef = 0.01;
  double value_coef = 0.5;

  void validate() const;
  friend bool operator==(const PPOConfig&, const PPOConfig&) = default;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// values holds one bootstrap entry beyond the rewards; a set done flag cuts
// both the bootstrap and the advantage recursion at that step.
GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                      std::span<const int> dones, double gamma, double lambda);

// Rescales to mean 0 and standard deviation 1 (population), with the
// deviation floored at 1e-8.
void normalize_advantages(std::span<double> advantages);

struct PPOBatch {
  Eigen::MatrixXd observations;  // input_dim x n, one column per sample
  std::vector<int> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> returns;
  std::vector<std::array<int, kNumActions>> valid;  // all ones when unmasked

  size_t size() const { return actions.size(); }
  // Samples at the given indices, in order.
  PPOBatch select(std::span<const size_t> indices) const;
  void append(const PPOBatch& other);
};

struct LossDiagnostics {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Mean loss over the batch:
//   -min(rho*A, clip(rho, 1-c, 1+c)*A) + value_coef*(V - R)^2 - entropy_coef*H
// with rho = exp(log pi(a|s) - old_log_prob), under the masked distribution.
// When grad is non-null it receives the exact gradient (overwritten).
LossDiagnostics ppo_loss(const PolicyParams& params, const PPOBatch& batch,
                         const PPOConfig& config, PolicyParams* grad);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void apply(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double learning_rate);
};

struct UpdateDiagnostics {
  LossDiagnostics loss;  // averaged over minibatches
  int minibatches = 0;
  bool diverged = false;
};

// Normalizes the batch advantages, then runs epochs x minibatches of Adam
// steps. On a non-finite loss or gradient the parameters and optimizer state
// are restored and diverged is set.
UpdateDiagnostics ppo_update(PolicyParams& params, AdamState& adam, PPOBatch batch,
                             const PPOConfig& config, Rng& rng);

}  // namespace bsnake
