// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "spikecp/policy.hpp"

namespace spikecp {

enum class Tier { Local, Remote };

struct CheckpointDescriptor {
  int t;
  Tier tier;
};

// One backward chunk: states [t0, t1) are consumed in reverse, recomputed from
// the checkpoint at source_t (== t0 for every strategy here).
struct BackwardChunk {
  int t0;
  int t1;
  int source_t;
};

// Double checkpointing groups local chunks under the remote chunk whose
// recomputation pass materializes their source checkpoints.
struct RemoteSegment {
  int r0;
  int r1;
  std::vector<BackwardChunk> chunks;
};

struct Schedule {
  Strategy strategy = Strategy::Base;
  int seq_len = 0;
  CheckpointPolicy policy;
  std::vector<CheckpointDescriptor> checkpoints;  // ascending t
  std::vector<BackwardChunk> chunks;              // ascending t0, covering [0, T) exactly
  std::vector<RemoteSegment> segments;            // Double only
  // Hierarchical: checkpoints with t >= resident_from never leave local memory.
  int resident_from = 0;

  bool is_checkpoint(int t) const {
    for (const auto& c : checkpoints)
      if (c.t == t) return true;
    return false;
  }
};

// Build the storage/recomputation plan for one training step.
// Throws PlanRejectionError naming the violated invariant.
Schedule plan(const CheckpointPolicy& policy, int seq_len);

}  // namespace spikecp
