// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "spikecp/ledger.hpp"
#include "spikecp/policy.hpp"

namespace spikecp {

// Closed-form schedule statistics, independent of the executor. The executor
// counts these operationally; tests assert exact agreement.
struct PolicyFootprint {
  std::int64_t nb_checkpoints = 0;    // states stored (Base: all T)
  std::int64_t replay_steps = 0;      // chunk-materialization lif steps
  std::int64_t extra_replay_steps = 0;  // Double's checkpoint-regeneration pass
  std::int64_t n_syncs = 0;           // N_c: communications with streaming memory
  std::int64_t n_transfers = 0;       // checkpoint states moved
};

PolicyFootprint policy_footprint(const CheckpointPolicy& policy, int seq_len);

// Peak local memory in state slots:
//   Base         m_s * T                          + m_others
//   Standard     m_s * (chunk + nb_checkpoints)   + m_others
//   Remote       m_s * (chunk + 1)                + m_others
//   Hierarchical m_s * (chunk + nb_local)         + m_others
//   Double       m_s * (chunk + remote/chunk)     + m_others
std::int64_t predict_memory_slots(const CheckpointPolicy& policy, int seq_len, std::int64_t m_s,
                                  std::int64_t m_others);

// Modeled step time in micro-units: T_fwd + T_bwd + replays * lif cost plus the
// strategy's transfer/sync terms, composed exactly as the executor charges them.
std::int64_t predict_time_micro(const CheckpointPolicy& policy, int seq_len, std::int64_t m_s,
                                const CostModel& costs);

}  // namespace spikecp
