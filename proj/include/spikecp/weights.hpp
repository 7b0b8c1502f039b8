// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/rng.hpp"
#include "spikecp/tensor.hpp"

namespace spikecp {

// Per-layer weights. w_in[pre][post] maps the previous layer's spikes (external
// input channels for layer 0), w_rec[pre][post] maps the layer's own spikes.
// Rows are the presynaptic index so one spike event touches one contiguous row.
template <typename T>
struct LayerWeights {
  Tensor2<T> w_in;
  Tensor2<T> w_rec;
};

template <typename T>
struct Weights {
  std::vector<LayerWeights<T>> layers;

  static Weights zeros(const NetworkConfig& cfg) {
    Weights w;
    const int n = cfg.neurons_per_layer;
    for (int l = 0; l < cfg.num_layers; ++l)
      w.layers.push_back({Tensor2<T>(n, n), Tensor2<T>(n, n)});
    return w;
  }

  // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], drawn in a fixed order.
  static Weights init(const NetworkConfig& cfg) {
    Weights w = zeros(cfg);
    DeterministicRng rng(derive_seed(cfg.seed, 0));
    const int n = cfg.neurons_per_layer;
    const float bound = 1.0f / std::sqrt(static_cast<float>(n));
    for (auto& layer : w.layers) {
      for (std::int64_t k = 0; k < layer.w_in.size(); ++k)
        layer.w_in.data()[k] = static_cast<T>(rng.uniform(-bound, bound));
      for (std::int64_t k = 0; k < layer.w_rec.size(); ++k)
        layer.w_rec.data()[k] = static_cast<T>(rng.uniform(-bound, bound));
    }
    return w;
  }

  std::int64_t slot_count() const {
    std::int64_t n = 0;
    for (const auto& l : layers) n += l.w_in.size() + l.w_rec.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.w_in.all_finite() || !l.w_rec.all_finite()) return false;
    return true;
  }
};

// Accumulated loss gradients; same shapes as the weights they update.
template <typename T>
using Gradients = Weights<T>;

template <typename T>
bool bitwise_equal(const Weights<T>& a, const Weights<T>& b) {
  if (a.layers.size() != b.layers.size()) return false;
  for (std::size_t l = 0; l < a.layers.size(); ++l)
    if (!bitwise_equal(a.layers[l].w_in, b.layers[l].w_in) ||
        !bitwise_equal(a.layers[l].w_rec, b.layers[l].w_rec))
      return false;
  return true;
}

template <typename To, typename From>
Weights<To> cast_weights(const Weights<From>& src) {
  Weights<To> dst;
  for (const auto& l : src.layers) {
    LayerWeights<To> out{Tensor2<To>(l.w_in.rows(), l.w_in.cols()),
                         Tensor2<To>(l.w_rec.rows(), l.w_rec.cols())};
    for (std::int64_t k = 0; k < l.w_in.size(); ++k)
      out.w_in.data()[k] = static_cast<To>(l.w_in.data()[k]);
    for (std::int64_t k = 0; k < l.w_rec.size(); ++k)
      out.w_rec.data()[k] = static_cast<To>(l.w_rec.data()[k]);
    dst.layers.push_back(std::move(out));
  }
  return dst;
}

// Order-independent checksum of the gradient bytes: each scalar is mixed with
// its position and the mixes are combined with wrapping addition.
std::uint64_t gradient_checksum(const Gradients<float>& g);

}  // namespace spikecp
