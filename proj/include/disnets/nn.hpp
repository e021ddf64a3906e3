#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "disnets/rng.hpp"

namespace disnets::nn {

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class PoolRounding { Floor, Ceil };

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// conv → LeakyReLU → maxpool → conv → LeakyReLU → maxpool → linear(latent) → LeakyReLU → linear(K).
struct NetConfig {
  int input_height = 10;
  int input_width = 12;
  int conv1_filters = 10;
  int conv1_kernel = 4;
  int conv2_filters = 10;
  int conv2_kernel = 3;
  int pool = 3;
  PoolRounding pool_rounding = PoolRounding::Floor;
  int latent_dim = 10;
  int output_dim = 12;
  double leaky_slope = 0.01;
  AdamConfig adam;
  int epochs_per_update = 3;
  int minibatch_size = 64;

  int pooled(int extent) const {
    return pool_rounding == PoolRounding::Floor ? extent / pool : (extent + pool - 1) / pool;
  }
  int h1() const { return pooled(input_height); }
  int w1() const { return pooled(input_width); }
  int h2() const { return pooled(h1()); }
  int w2() const { return pooled(w1()); }
  int flat_dim() const { return conv2_filters * h2() * w2(); }
  void validate() const;
};

/// Offsets of each parameter block inside the flat parameter vector.
struct ParamLayout {
  Eigen::Index conv1_w = 0, conv1_b = 0, conv2_w = 0, conv2_b = 0;
  Eigen::Index latent_w = 0, latent_b = 0, out_w = 0, out_b = 0, total = 0;

  explicit ParamLayout(const NetConfig& cfg);
};

/// All trainable parameters in one flat vector; gradients share the same layout.
struct NetWeights {
  Eigen::VectorXd params;

  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;

  static NetWeights zeros(const NetConfig& cfg);

  MatMap latent_w(const NetConfig& cfg);
  ConstMatMap latent_w(const NetConfig& cfg) const;
  MatMap out_w(const NetConfig& cfg);
  ConstMatMap out_w(const NetConfig& cfg) const;

  bool all_finite() const { return params.allFinite(); }
};

using Context = Eigen::MatrixXd;  // input_height × input_width

/// Training sample; samples taken from one decision share their context.
struct Sample {
  std::shared_ptr<const Context> context;
  int action = 0;
  double reward = 0.0;
};

/// Intermediate activations kept for backpropagation.
struct ForwardCache {
  Eigen::VectorXd a1_pre, a1, p1;
  std::vector<Eigen::Index> p1_arg;
  Eigen::VectorXd a2_pre, a2, p2;
  std::vector<Eigen::Index> p2_arg;
  Eigen::VectorXd latent_pre;
  Eigen::VectorXd z;
  Eigen::VectorXd outputs;
};

/// He-uniform weights, zero biases.
NetWeights init_weights(const NetConfig& cfg, Rng& rng);

void forward(const NetConfig& cfg, const NetWeights& w, const Context& context, ForwardCache& cache);

struct ForwardResult {
  Eigen::VectorXd z;
  Eigen::VectorXd outputs;
};
ForwardResult forward(const NetConfig& cfg, const NetWeights& w, const Context& context);

/// Mean over the batch of (f(s)[k] - r)^2, only chosen actions contribute.
double loss(const NetConfig& cfg, const NetWeights& w, std::span<const Sample> batch);

/// Exact gradient of `loss` over the batch.
NetWeights backward(const NetConfig& cfg, const NetWeights& w, std::span<const Sample> batch);

/// Same as backward, reusing caller-owned scratch; returns the batch loss.
double accumulate_gradient(const NetConfig& cfg, const NetWeights& w, std::span<const Sample* const> batch,
                           NetWeights& grad, ForwardCache& scratch);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  static AdamState zeros(const NetConfig& cfg);
};

void adam_step(const AdamConfig& cfg, NetWeights& w, AdamState& state, const NetWeights& grad);

/// epochs_per_update epochs of Adam over shuffled minibatches of the buffer.
/// Returns the mean minibatch loss (0 for an empty buffer, in which case w is untouched).
double train_update(const NetConfig& cfg, NetWeights& w, AdamState& adam, std::span<const Sample> buffer, Rng& rng);

}  // namespace disnets::nn
