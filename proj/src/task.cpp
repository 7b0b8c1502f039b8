// SPDX-License-Identifier: Apache-2.0

#include "spikecp/task.hpp"

#include "spikecp/rng.hpp"

namespace spikecp {

TaskSpec gen_task(std::uint64_t seed, const NetworkConfig& cfg, float poisson_rate) {
  TaskSpec task;
  task.poisson_rate = poisson_rate;
  task.inputs = SpikeRecord(cfg.seq_len, 1, cfg.batch_size, cfg.neurons_per_layer);

  DeterministicRng events(derive_seed(seed, 1));
  for (int t = 0; t < cfg.seq_len; ++t) {
    auto& slice = task.inputs.slice(t, 0);
    for (int b = 0; b < cfg.batch_size; ++b)
      for (int n = 0; n < cfg.neurons_per_layer; ++n)
        if (events.uniform01() < poisson_rate) slice.push_back(task.inputs.pack(b, n));
  }

  // Target spike counts: a modest per-neuron rate over the horizon.
  DeterministicRng targets(derive_seed(seed, 2));
  task.target_counts.resize(cfg.neurons_per_layer);
  for (int n = 0; n < cfg.neurons_per_layer; ++n)
    task.target_counts[n] = targets.uniform(0.05f, 0.25f) * static_cast<float>(cfg.seq_len);
  return task;
}

}  // namespace spikecp
