// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "spikecp/errors.hpp"

namespace spikecp {

enum class Strategy { Base, Standard, Remote, Hierarchical, Double };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);  // throws ConfigError

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// Strategy selector plus its hyperparameters. chunk_size is the local
// recomputation window for every chunked strategy; nb_local only matters for
// Hierarchical, remote_chunk_size only for Double.
struct CheckpointPolicy {
  Strategy strategy = Strategy::Base;
  int chunk_size = 1;
  int nb_local = 1;
  int remote_chunk_size = 1;

  // nb_checkpoints per Eq. 1, with non-divisible T resolved by a shorter
  // final chunk (so ceil).
  std::int64_t nb_checkpoints(int seq_len) const {
    return ceil_div(seq_len, chunk_size);
  }
  std::int64_t nb_remote_checkpoints(int seq_len) const {
    return ceil_div(seq_len, remote_chunk_size);
  }

  void validate(int seq_len) const {
    if (seq_len < 1) throw PlanRejectionError("seq_len must be >= 1");
    if (strategy == Strategy::Base) return;
    if (chunk_size < 1) throw PlanRejectionError("chunk_size must be >= 1");
    if (strategy == Strategy::Hierarchical) {
      const std::int64_t nb = nb_checkpoints(seq_len);
      if (nb_local < 1)
        throw PlanRejectionError("nb_local must be >= 1");
      if (nb_local > nb)
        throw PlanRejectionError("nb_local must be <= nb_checkpoints (" + std::to_string(nb) +
                                 ")");
    }
    if (strategy == Strategy::Double) {
      if (remote_chunk_size < 1) throw PlanRejectionError("remote_chunk_size must be >= 1");
      if (remote_chunk_size % chunk_size != 0)
        throw PlanRejectionError("chunk_size must divide remote_chunk_size");
    }
  }
};

}  // namespace spikecp
