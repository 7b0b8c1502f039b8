// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/spikes.hpp"

namespace spikecp {

// A synthetic training instance: Poisson-like external drive plus the target
// spike-count vector the loss pulls the last layer towards.
struct TaskSpec {
  SpikeRecord inputs;  // (T, 1) record over the input channels
  std::vector<float> target_counts;
  float poisson_rate = 0.0f;
};

// Independent Bernoulli(rate) events per (t, batch, input neuron), emitted in
// canonical order; targets drawn once from a separate stream of the same seed.
TaskSpec gen_task(std::uint64_t seed, const NetworkConfig& cfg, float poisson_rate);

}  // namespace spikecp
