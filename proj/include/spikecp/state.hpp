// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/tensor.hpp"

namespace spikecp {

// Per-layer membrane potential v and synaptic current i at one timestep.
// This is the object checkpointing stores, drops, and recomputes.
template <typename T>
struct NetworkState {
  std::vector<Tensor2<T>> v;
  std::vector<Tensor2<T>> i;

  NetworkState() = default;

  static NetworkState zeros(const NetworkConfig& cfg) {
    NetworkState s;
    s.v.reserve(cfg.num_layers);
    s.i.reserve(cfg.num_layers);
    for (int l = 0; l < cfg.num_layers; ++l) {
      s.v.emplace_back(cfg.batch_size, cfg.neurons_per_layer);
      s.i.emplace_back(cfg.batch_size, cfg.neurons_per_layer);
    }
    return s;
  }

  int num_layers() const { return static_cast<int>(v.size()); }

  std::int64_t slot_count() const {
    std::int64_t n = 0;
    for (const auto& t : v) n += t.size();
    for (const auto& t : i) n += t.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& t : v)
      if (!t.all_finite()) return false;
    for (const auto& t : i)
      if (!t.all_finite()) return false;
    return true;
  }
};

template <typename T>
bool bitwise_equal(const NetworkState<T>& a, const NetworkState<T>& b) {
  if (a.v.size() != b.v.size()) return false;
  for (std::size_t l = 0; l < a.v.size(); ++l)
    if (!bitwise_equal(a.v[l], b.v[l]) || !bitwise_equal(a.i[l], b.i[l])) return false;
  return true;
}

}  // namespace spikecp
