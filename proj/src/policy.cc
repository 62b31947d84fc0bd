#include "bsnake/policy.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace bsnake {

namespace {

Eigen::Index net_size(Eigen::Index input, Eigen::Index hidden, Eigen::Index outputs) {
  return hidden * input + hidden + hidden * hidden + hidden + outputs * hidden + outputs;
}

constexpr char kMagic[8] = {'B', 'S', 'N', 'K', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("checkpoint: truncated header");
  return value;
}

}  // namespace

PolicyParams::PolicyParams(int input_dim, int hidden) : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim <= 0 || hidden <= 0) throw ContractViolation("PolicyParams: bad dimensions");
  data_ = Eigen::VectorXd::Zero(net_size(input_dim, hidden, kNumActions) +
                                net_size(input_dim, hidden, 1));
}

LayerOffsets PolicyParams::offsets(int net) const {
  const Eigen::Index d = input_dim_;
  const Eigen::Index h = hidden_;
  LayerOffsets o{};
  o.w1 = net == 0 ? 0 : net_size(d, h, kNumActions);
  o.b1 = o.w1 + h * d;
  o.w2 = o.b1 + h;
  o.b2 = o.w2 + h * h;
  o.w3 = o.b2 + h;
  o.b3 = o.w3 + net_outputs(net) * h;
  o.end = o.b3 + net_outputs(net);
  return o;
}

PolicyParams PolicyParams::initialize(int input_dim, uint64_t seed, int hidden) {
  PolicyParams p(input_dim, hidden);
  Rng rng(seed);
  for (int net = 0; net < 2; ++net) {
    const LayerOffsets o = p.offsets(net);
    auto fill = [&](Eigen::Index begin, Eigen::Index count, double stddev) {
      for (Eigen::Index i = 0; i < count; ++i) p.data_[begin + i] = rng.normal() * stddev;
    };
    fill(o.w1, o.b1 - o.w1, 1.0 / std::sqrt(static_cast<double>(input_dim)));
    fill(o.w2, o.b2 - o.w2, 1.0 / std::sqrt(static_cast<double>(hidden)));
    const double out_gain = net == 0 ? 0.01 : 1.0;
    fill(o.w3, o.b3 - o.w3, out_gain / std::sqrt(static_cast<double>(hidden)));
  }
  return p;
}

NetActivations forward_batch(const PolicyParams& params, int net, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != params.input_dim()) {
    throw ContractViolation("policy: observation size " + std::to_string(inputs.rows()) +
                            " does not match input dimension " +
                            std::to_string(params.input_dim()));
  }
  const LayerOffsets o = params.offsets(net);
  const Eigen::Index h = params.hidden();
  const Eigen::Index d = params.input_dim();
  const Eigen::Index k = params.net_outputs(net);
  NetActivations a;
  a.h1.noalias() = params.matrix(o.w1, h, d) * inputs;
  a.h1.colwise() += params.vector(o.b1, h);
  a.h1 = a.h1.array().tanh().matrix();
  a.h2.noalias() = params.matrix(o.w2, h, h) * a.h1;
  a.h2.colwise() += params.vector(o.b2, h);
  a.h2 = a.h2.array().tanh().matrix();
  a.out.noalias() = params.matrix(o.w3, k, h) * a.h2;
  a.out.colwise() += params.vector(o.b3, k);
  return a;
}

void backward_batch(const PolicyParams& params, int net, const Eigen::MatrixXd& inputs,
                    const NetActivations& acts, const Eigen::MatrixXd& d_out,
                    PolicyParams& grad) {
  const LayerOffsets o = params.offsets(net);
  const Eigen::Index h = params.hidden();
  const Eigen::Index d = params.input_dim();
  const Eigen::Index k = params.net_outputs(net);

  grad.matrix(o.w3, k, h).noalias() += d_out * acts.h2.transpose();
  grad.vector(o.b3, k) += d_out.rowwise().sum();
  Eigen::MatrixXd dz2 = params.matrix(o.w3, k, h).transpose() * d_out;
  dz2.array() *= 1.0 - acts.h2.array().square();
  grad.matrix(o.w2, h, h).noalias() += dz2 * acts.h1.transpose();
  grad.vector(o.b2, h) += dz2.rowwise().sum();
  Eigen::MatrixXd dz1 = params.matrix(o.w2, h, h).transpose() * dz2;
  dz1.array() *= 1.0 - acts.h1.array().square();
  grad.matrix(o.w1, h, d).noalias() += dz1 * inputs.transpose();
  grad.vector(o.b1, h) += dz1.rowwise().sum();
}

std::array<double, kNumActions> masked_log_softmax(const std::array<double, kNumActions>& logits,
                                                   const std::array<int, kNumActions>& valid) {
  const bool any_valid = valid[0] || valid[1] || valid[2] || valid[3];
  auto is_on = [&](int i) { return !any_valid || valid[i] != 0; };
  double max_logit = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kNumActions; ++i) {
    if (is_on(i)) max_logit = std::max(max_logit, logits[i]);
  }
  double sum = 0.0;
  for (int i = 0; i < kNumActions; ++i) {
    if (is_on(i)) sum += std::exp(logits[i] - max_logit);
  }
  const double log_z = max_logit + std::log(sum);
  std::array<double, kNumActions> out{};
  for (int i = 0; i < kNumActions; ++i) {
    out[i] = is_on(i) ? logits[i] - log_z : -std::numeric_limits<double>::infinity();
  }
  return out;
}

PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> observation) {
  if (static_cast<Eigen::Index>(observation.size()) != params.input_dim()) {
    throw ContractViolation("policy_forward: observation size " +
                            std::to_string(observation.size()) + " does not match input " +
                            std::to_string(params.input_dim()));
  }
  const Eigen::Map<const Eigen::MatrixXd> x(observation.data(), params.input_dim(), 1);
  PolicyOutput out;
  const NetActivations pa = forward_batch(params, 0, x);
  const NetActivations va = forward_batch(params, 1, x);
  for (int i = 0; i < kNumActions; ++i) out.logits[i] = pa.out(i, 0);
  const auto logp = masked_log_softmax(out.logits, {1, 1, 1, 1});
  for (int i = 0; i < kNumActions; ++i) out.probabilities[i] = std::exp(logp[i]);
  out.value = va.out(0, 0);
  return out;
}

void save_checkpoint(const PolicyParams& params, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  write_pod<uint32_t>(out, kCheckpointVersion);
  write_pod<uint32_t>(out, static_cast<uint32_t>(params.input_dim()));
  write_pod<uint32_t>(out, static_cast<uint32_t>(params.hidden()));
  write_pod<uint64_t>(out, static_cast<uint64_t>(params.size()));
  out.write(reinterpret_cast<const char*>(params.data().data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

PolicyParams load_checkpoint(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("checkpoint: bad magic");
  }
  const auto version = read_pod<uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw ParseError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto input_dim = read_pod<uint32_t>(in);
  const auto hidden = read_pod<uint32_t>(in);
  const auto count = read_pod<uint64_t>(in);
  if (input_dim == 0 || hidden == 0 || input_dim > (1u << 24) || hidden > (1u << 16)) {
    throw ParseError("checkpoint: implausible shape header");
  }
  PolicyParams params(static_cast<int>(input_dim), static_cast<int>(hidden));
  if (count != static_cast<uint64_t>(params.size())) {
    throw ParseError("checkpoint: parameter count does not match shape header");
  }
  in.read(reinterpret_cast<char*>(params.data().data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ParseError("checkpoint: truncated parameter block");
  if (!params.all_finite()) throw ParseError("checkpoint: non-finite parameters");
  return params;
}

void save_checkpoint(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  save_checkpoint(params, out);
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("checkpoint: cannot open " + path);
  return load_checkpoint(in);
}

}  // namespace bsnake
