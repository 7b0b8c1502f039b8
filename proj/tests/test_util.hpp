// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/network.hpp"
#include "spikecp/rng.hpp"
#include "spikecp/task.hpp"

namespace spikecp::testutil {

struct Instance {
  NetworkConfig cfg;
  Weights<float> weights;
  TaskSpec task;
  LossSpec<float> loss;
};

inline Instance make_instance(std::uint64_t seed, int T, int layers, int neurons, int batch,
                              float rate = 0.15f, float theta = 0.3f, int tiles = 1) {
  Instance inst;
  inst.cfg.num_layers = layers;
  inst.cfg.neurons_per_layer = neurons;
  inst.cfg.batch_size = batch;
  inst.cfg.seq_len = T;
  inst.cfg.virtual_tiles = tiles;
  inst.cfg.threshold = theta;
  inst.cfg.seed = seed;
  inst.cfg.validate();
  inst.weights = Weights<float>::init(inst.cfg);
  inst.task = gen_task(seed, inst.cfg, rate);
  inst.loss.kind = LossKind::SpikeCountMse;
  inst.loss.target_counts = inst.task.target_counts;
  return inst;
}

// Random state with entries in [-scale, scale].
inline NetworkState<float> random_state(const NetworkConfig& cfg, std::uint64_t seed,
                                        float scale = 1.0f) {
  NetworkState<float> s = NetworkState<float>::zeros(cfg);
  DeterministicRng rng(seed);
  for (int l = 0; l < cfg.num_layers; ++l) {
    for (std::int64_t k = 0; k < s.v[l].size(); ++k) s.v[l].data()[k] = rng.uniform(-scale, scale);
    for (std::int64_t k = 0; k < s.i[l].size(); ++k) s.i[l].data()[k] = rng.uniform(-scale, scale);
  }
  return s;
}

// Random canonical spike slices for one timestep across all layers.
inline void random_spikes(SpikeRecord& record, int t, const NetworkConfig& cfg,
                          std::uint64_t seed, float rate) {
  DeterministicRng rng(seed);
  for (int l = 0; l < record.num_layers(); ++l) {
    auto& slice = record.slice(t, l);
    slice.clear();
    for (int b = 0; b < cfg.batch_size; ++b)
      for (int n = 0; n < cfg.neurons_per_layer; ++n)
        if (rng.uniform01() < rate) slice.push_back(record.pack(b, n));
  }
}

}  // namespace spikecp::testutil
