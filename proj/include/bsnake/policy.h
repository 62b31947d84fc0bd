#pragma once

// Policy and value networks: two independent tanh MLPs over the flattened
// observation, input -> hidden -> hidden -> {4 logits | 1 value}.
//
// All parameters live in one flat vector so that optimizers, gradient checks
// and checkpoints can treat them uniformly. Within each network the order is
// W1, b1, W2, b2, W3, b3; matrices are column-major (Eigen default). The
// policy network comes first.

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "bsnake/engine.h"
#include "bsnake/heuristics.h"

namespace bsnake {

inline constexpr int kDefaultHidden = 128;

struct LayerOffsets {
  Eigen::Index w1, b1, w2, b2, w3, b3, end;
};

class PolicyParams {
 public:
  PolicyParams() = default;
  // Zero-filled parameters.
  PolicyParams(int input_dim, int hidden = kDefaultHidden);

  // Scaled-normal initialization; the policy output layer is scaled down so
  // the initial action distribution is close to uniform.
  static PolicyParams initialize(int input_dim, uint64_t seed, int hidden = kDefaultHidden);

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  Eigen::Index size() const { return data_.size(); }

  Eigen::VectorXd& data() { return data_; }
  const Eigen::VectorXd& data() const { return data_; }

  // net 0 = policy, net 1 = value.
  int net_outputs(int net) const { return net == 0 ? kNumActions : 1; }
  LayerOffsets offsets(int net) const;

  Eigen::Map<Eigen::MatrixXd> matrix(Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
    return {data_.data() + offset, rows, cols};
  }
  Eigen::Map<const Eigen::MatrixXd> matrix(Eigen::Index offset, Eigen::Index rows,
                                           Eigen::Index cols) const {
    return {data_.data() + offset, rows, cols};
  }
  Eigen::Map<Eigen::VectorXd> vector(Eigen::Index offset, Eigen::Index n) {
    return {data_.data() + offset, n};
  }
  Eigen::Map<const Eigen::VectorXd> vector(Eigen::Index offset, Eigen::Index n) const {
    return {data_.data() + offset, n};
  }

  bool all_finite() const { return data_.allFinite(); }
  friend bool operator==(const PolicyParams& a, const PolicyParams& b) {
    return a.input_dim_ == b.input_dim_ && a.hidden_ == b.hidden_ && a.data_ == b.data_;
  }

 private:
  int input_dim_ = 0;
  int hidden_ = 0;
  Eigen::VectorXd data_;
};

struct PolicyOutput {
  ActionProbs probabilities{};
  std::array<double, kNumActions> logits{};
  double value = 0.0;
};

PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> observation);

// Intermediate activations for a batch (one column per sample), kept for
// backpropagation.
struct NetActivations {
  Eigen::MatrixXd h1;
  Eigen::MatrixXd h2;
  Eigen::MatrixXd out;
};

NetActivations forward_batch(const PolicyParams& params, int net, const Eigen::MatrixXd& inputs);

// Accumulates d(loss)/d(params of `net`) into grad given d(loss)/d(out).
void backward_batch(const PolicyParams& params, int net, const Eigen::MatrixXd& inputs,
                    const NetActivations& acts, const Eigen::MatrixXd& d_out,
                    PolicyParams& grad);

// Log-softmax over the valid entries only; masked entries get -inf. An
// all-zero mask is treated as all-ones.
std::array<double, kNumActions> masked_log_softmax(const std::array<double, kNumActions>& logits,
                                                   const std::array<int, kNumActions>& valid);

// Checkpoint format (little-endian binary):
//   8 bytes  magic "BSNKCKPT"
//   u32      format version (1)
//   u32      input_dim
//   u32      hidden
//   u64      parameter count
//   f64[n]   parameters in the flat order documented above
inline constexpr uint32_t kCheckpointVersion = 1;
void save_checkpoint(const PolicyParams& params, std::ostream& out);
PolicyParams load_checkpoint(std::istream& in);
void save_checkpoint(const PolicyParams& params, const std::string& path);
PolicyParams load_checkpoint(const std::string& path);

}  // namespace bsnake
