// SPDX-License-Identifier: Apache-2.0

#include "spikecp/predict.hpp"

#include <algorithm>

namespace spikecp {

namespace {

// Replay work for one chunked range [0, len): every chunk of c steps replays
// len_chunk - 1 states from its checkpoint, so a range of len steps with
// nb chunks replays len - nb.
std::int64_t gradient_pass_replays(std::int64_t len, std::int64_t chunk) {
  return len - ceil_div(len, chunk);
}

}  // namespace

PolicyFootprint policy_footprint(const CheckpointPolicy& policy, int seq_len) {
  policy.validate(seq_len);
  PolicyFootprint f;
  const std::int64_t T = seq_len;
  switch (policy.strategy) {
    case Strategy::Base:
      f.nb_checkpoints = T;
      break;

    case Strategy::Standard:
      f.nb_checkpoints = policy.nb_checkpoints(seq_len);
      f.replay_steps = gradient_pass_replays(T, policy.chunk_size);
      break;

    case Strategy::Remote:
      f.nb_checkpoints = policy.nb_checkpoints(seq_len);
      f.replay_steps = gradient_pass_replays(T, policy.chunk_size);
      // Each checkpoint is written once and read once (Eq. 7's 2 * nb).
      f.n_syncs = 2 * f.nb_checkpoints;
      f.n_transfers = 2 * f.nb_checkpoints;
      break;

    case Strategy::Hierarchical: {
      f.nb_checkpoints = policy.nb_checkpoints(seq_len);
      f.replay_steps = gradient_pass_replays(T, policy.chunk_size);
      // Eq. 10, clamped at zero: batched communications minus the nb_local
      // checkpoints that never travel.
      const std::int64_t per_direction =
          std::max<std::int64_t>(0, ceil_div(f.nb_checkpoints, policy.nb_local) - policy.nb_local);
      f.n_syncs = 2 * per_direction;
      f.n_transfers = 2 * per_direction * policy.nb_local;
      break;
    }

    case Strategy::Double: {
      const std::int64_t nbr = policy.nb_remote_checkpoints(seq_len);
      f.nb_checkpoints = nbr;
      for (std::int64_t k = 0; k < nbr; ++k) {
        const std::int64_t r0 = k * policy.remote_chunk_size;
        const std::int64_t len = std::min<std::int64_t>(policy.remote_chunk_size, T - r0);
        const std::int64_t locals = ceil_div(len, policy.chunk_size);
        // Pass 1 regenerates the local checkpoints from the remote one; pass 2
        // materializes each local chunk for the gradient computation.
        f.extra_replay_steps += (locals - 1) * policy.chunk_size;
        f.replay_steps += len - locals;
      }
      f.n_syncs = 2 * nbr;  // Eq. 13
      f.n_transfers = 2 * nbr;
      break;
    }
  }
  return f;
}

std::int64_t predict_memory_slots(const CheckpointPolicy& policy, int seq_len, std::int64_t m_s,
                                  std::int64_t m_others) {
  policy.validate(seq_len);
  std::int64_t term = 0;
  switch (policy.strategy) {
    case Strategy::Base: term = seq_len; break;
    case Strategy::Standard: term = policy.chunk_size + policy.nb_checkpoints(seq_len); break;
    case Strategy::Remote: term = policy.chunk_size + 1; break;
    case Strategy::Hierarchical: term = policy.chunk_size + policy.nb_local; break;
    case Strategy::Double:
      term = policy.chunk_size + policy.remote_chunk_size / policy.chunk_size;
      break;
  }
  return m_s * term + m_others;
}

std::int64_t predict_time_micro(const CheckpointPolicy& policy, int seq_len, std::int64_t m_s,
                                const CostModel& costs) {
  const PolicyFootprint f = policy_footprint(policy, seq_len);
  const std::int64_t T = seq_len;
  std::int64_t total = T * costs.fwd_step_micro() + T * costs.bwd_micro();
  total += (f.replay_steps + f.extra_replay_steps) * costs.lif_micro();
  const std::int64_t tc = costs.tc_micro(m_s);
  const std::int64_t ts = costs.ts_micro();
  switch (policy.strategy) {
    case Strategy::Base:
    case Strategy::Standard:
      break;
    case Strategy::Remote:
    case Strategy::Double:
      total += f.n_syncs * (tc + ts);
      break;
    case Strategy::Hierarchical:
      total += f.n_syncs * (policy.nb_local * tc + ts);
      break;
  }
  return total;
}

}  // namespace spikecp
