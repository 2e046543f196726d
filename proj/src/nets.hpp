#pragma once

#include <cstddef>
#include <vector>

#include "rng.hpp"

namespace biovolt {

/// Fully connected network with tanh hidden layers and a linear output,
/// 64-bit throughout, with hand-written reverse-mode gradients.
class Mlp {
public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  void init_params(Rng& rng, double scale);
  /// Shrink the output layer's weights and biases; a near-zero head keeps a
  /// freshly initialised policy close to the action-range midpoint.
  void scale_output_layer(double factor);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Per-sample activation cache for the backward pass.
  struct Workspace {
    std::vector<std::vector<double>> activations;  // [layer][unit], activations[0] = input
  };

  std::vector<double> forward(const std::vector<double>& input, Workspace& ws) const;
  std::vector<double> forward(const std::vector<double>& input) const;

  /// Accumulates dL/dparams into grad (same layout as params) given dL/doutput,
  /// and returns dL/dinput.
  std::vector<double> backward(const Workspace& ws, const std::vector<double>& dout,
                               std::vector<double>& grad) const;

  /// Polyak soft update: params <- tau * other + (1 - tau) * params.
  void soft_update_from(const Mlp& other, double tau);

  const std::vector<int>& layer_sizes() const { return sizes_; }

private:
  std::vector<int> sizes_;
  std::vector<double> params_;  // per layer: weights (row-major out x in), then biases
};

/// Adam with bias correction.
class Adam {
public:
  Adam() = default;
  Adam(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad);

  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

} // namespace biovolt
