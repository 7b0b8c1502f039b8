// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "spikecp/errors.hpp"

namespace spikecp {

// Network geometry and LIF dynamics parameters. seq_len is the BPTT horizon T;
// virtual_tiles partitions neurons for the per-tile memory accounting.
struct NetworkConfig {
  int num_layers = 3;
  int neurons_per_layer = 32;
  int batch_size = 8;
  int seq_len = 64;
  int virtual_tiles = 1;
  // Dynamics defaults sit in a sparse-activity regime (~10% firing) under the
  // default Poisson drive and fan-in weight init.
  float decay_v = 0.7f;
  float decay_i = 0.3f;
  float threshold = 0.5f;
  float surrogate_beta = 1.0f;
  std::uint64_t seed = 0;

  // Slots (scalars) of one full network state: v and i for every layer cell.
  std::int64_t state_slots() const {
    return 2ll * num_layers * batch_size * neurons_per_layer;
  }

  void validate() const {
    if (seq_len < 1) throw ConfigError("seq_len must be >= 1");
    if (num_layers < 1) throw ConfigError("num_layers must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (neurons_per_layer < 1) throw ConfigError("neurons_per_layer must be >= 1");
    if (virtual_tiles < 1) throw ConfigError("virtual_tiles must be >= 1");
    if (neurons_per_layer % virtual_tiles != 0)
      throw ConfigError("neurons_per_layer must be divisible by virtual_tiles");
    if (!(decay_v > 0.0f && decay_v < 1.0f)) throw ConfigError("decay_v must be in (0,1)");
    if (!(decay_i > 0.0f && decay_i < 1.0f)) throw ConfigError("decay_i must be in (0,1)");
    if (!(threshold > 0.0f)) throw ConfigError("threshold must be > 0");
    if (!(surrogate_beta > 0.0f)) throw ConfigError("surrogate_beta must be > 0");
  }
};

}  // namespace spikecp
