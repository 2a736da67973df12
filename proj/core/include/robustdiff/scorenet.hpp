#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "robustdiff/rng.hpp"
#include "robustdiff/vec.hpp"

namespace robustdiff {

/// Sinusoidal embedding of a time in [0, horizon]: interleaved
/// [sin(2 pi f_k t/T), cos(2 pi f_k t/T)] pairs over feature_dim/2 geometric
/// frequencies f_k = 0.5 * 2^k. The lowest frequency spans half a period over
/// [0, T], so the embedding is injective on the horizon (and has constant
/// norm sqrt(feature_dim / 2)).
Vector time_features(double t, double horizon, std::size_t feature_dim);

struct NetConfig {
  std::size_t data_dim = 2;
  std::vector<std::size_t> hidden = {64, 64};
  std::size_t time_feature_dim = 16;  // even
  double horizon = 1.0;

  std::size_t input_dim() const { return data_dim + time_feature_dim; }
  void validate() const;
};

struct DenseLayer {
  Matrix w;  // (out x in)
  Vector b;  // (out)
};

struct LayerGrads {
  Matrix w;
  Vector b;
};
using NetGrads = std::vector<LayerGrads>;

/// Feed-forward noise-prediction network eps_hat(x, t) with tanh hidden
/// activations, a linear output layer, and hand-written reverse-mode
/// gradients. Weights are initialized with fan-in scaled uniform draws.
class ScoreNet {
 public:
  ScoreNet() = default;
  ScoreNet(NetConfig cfg, Rng& rng);

  const NetConfig& config() const { return cfg_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Activations retained by a forward pass for the matching backward pass.
  /// acts[l] is the input to layer l; acts.back().rows() is the batch size.
  struct Workspace {
    std::vector<Matrix> acts;
    bool valid = false;
  };

  /// Batched forward over rows of x with per-row times; output row i is
  /// eps_hat(x_i, t_i). Pure; pass a workspace to retain activations.
  Matrix forward_batch(const Matrix& x, std::span<const double> t,
                       Workspace* ws = nullptr) const;

  /// Batched forward at one shared time (sampler hot path).
  Matrix forward_batch(const Matrix& x, double t) const;

  /// Single-example forward; retains activations so backward() can run.
  Vector forward(const Vector& x, double t);

  /// Parameter gradients of sum_i <upstream_i, output_i> for the forward
  /// pass recorded in ws. Shapes mirror the layer parameters.
  NetGrads backward(const Workspace& ws, const Matrix& upstream) const;

  /// Gradients for the last single-example forward(). Throws if no forward
  /// pass has been recorded.
  NetGrads backward(const Vector& upstream_grad) const;

  NetGrads zero_grads() const;

  std::size_t parameter_count() const;
  double get_parameter(std::size_t flat_index) const;
  void set_parameter(std::size_t flat_index, double value);

 private:
  NetConfig cfg_;
  std::vector<DenseLayer> layers_;
  Workspace last_;  // single-example convenience path
};

/// Flattens gradients in the same order as ScoreNet parameter indices.
Vector flatten_grads(const NetGrads& grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Standard Adam with bias correction. One state instance per network.
class AdamState {
 public:
  AdamState() = default;
  explicit AdamState(const ScoreNet& net, AdamConfig cfg = {});

  void step(ScoreNet& net, const NetGrads& grads);
  long step_count() const { return count_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  NetGrads m_;
  NetGrads v_;
  long count_ = 0;
};

/// Binary weight checkpoint: magic "RDN1", u32 version, then u64 data_dim,
/// u64 time_feature_dim, f64 horizon, u64 width count, u64 widths
/// (input..output), then per layer: row-major (out x in) f64 weights followed
/// by f64 biases. All fields little-endian.
void save_checkpoint(const std::string& path, const ScoreNet& net);
ScoreNet load_checkpoint(const std::string& path);

}  // namespace robustdiff
