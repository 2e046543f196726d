#include "nets.hpp"

#include <cmath>

#include "errors.hpp"

namespace biovolt {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw InvalidArgument("Mlp: need at least input and output layers");
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    n += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
  }
  params_.assign(n, 0.0);
}

void Mlp::init_params(Rng& rng, double scale) {
  std::size_t k = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int fan_in = sizes_[l];
    const double s = scale / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < sizes_[l + 1] * fan_in; ++i) params_[k++] = s * rng.normal();
    for (int i = 0; i < sizes_[l + 1]; ++i) params_[k++] = 0.0;
  }
}

void Mlp::scale_output_layer(double factor) {
  const std::size_t last =
      static_cast<std::size_t>(sizes_.back()) * sizes_[sizes_.size() - 2] + sizes_.back();
  for (std::size_t i = params_.size() - last; i < params_.size(); ++i) params_[i] *= factor;
}

std::vector<double> Mlp::forward(const std::vector<double>& input, Workspace& ws) const {
  if (static_cast<int>(input.size()) != sizes_.front()) {
    throw InvalidArgument("Mlp::forward: input dimension mismatch");
  }
  ws.activations.assign(sizes_.size(), {});
  ws.activations[0] = input;

  std::size_t k = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const int in = sizes_[l];
    const int out = sizes_[l + 1];
    const std::vector<double>& x = ws.activations[l];
    std::vector<double> y(out);
    const double* w = params_.data() + k;
    const double* b = params_.data() + k + static_cast<std::size_t>(out) * in;
    for (int i = 0; i < out; ++i) {
      double acc = b[i];
      const double* wi = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) acc += wi[j] * x[j];
      y[i] = (l + 2 < sizes_.size()) ? std::tanh(acc) : acc;
    }
    k += static_cast<std::size_t>(out) * in + out;
    ws.activations[l + 1] = std::move(y);
  }
  return ws.activations.back();
}

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  Workspace ws;
  return forward(input, ws);
}

std::vector<double> Mlp::backward(const Workspace& ws, const std::vector<double>& dout,
                                  std::vector<double>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);

  // Offsets of each layer's weights in the flat parameter vector.
  std::vector<std::size_t> offsets(sizes_.size() - 1);
  std::size_t k = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets[l] = k;
    k += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l] + sizes_[l + 1];
  }

  std::vector<double> delta = dout;  // dL/d(pre-activation) of the current layer
  for (std::size_t li = sizes_.size() - 1; li-- > 0;) {
    const int in = sizes_[li];
    const int out = sizes_[li + 1];
    const std::vector<double>& x = ws.activations[li];
    const std::vector<double>& y = ws.activations[li + 1];

    // Output layer is linear; hidden layers are tanh.
    if (li + 2 < sizes_.size()) {
      for (int i = 0; i < out; ++i) delta[i] *= 1.0 - y[i] * y[i];
    }

    double* gw = grad.data() + offsets[li];
    double* gb = gw + static_cast<std::size_t>(out) * in;
    const double* w = params_.data() + offsets[li];
    std::vector<double> dx(in, 0.0);
    for (int i = 0; i < out; ++i) {
      const double d = delta[i];
      gb[i] += d;
      double* gwi = gw + static_cast<std::size_t>(i) * in;
      const double* wi = w + static_cast<std::size_t>(i) * in;
      for (int j = 0; j < in; ++j) {
        gwi[j] += d * x[j];
        dx[j] += d * wi[j];
      }
    }
    delta = std::move(dx);
  }
  return delta;
}

void Mlp::soft_update_from(const Mlp& other, double tau) {
  if (other.params_.size() != params_.size()) {
    throw InvalidArgument("soft_update_from: parameter size mismatch");
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i] = tau * other.params_[i] + (1.0 - tau) * params_[i];
  }
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps_);
  }
}

} // namespace biovolt
