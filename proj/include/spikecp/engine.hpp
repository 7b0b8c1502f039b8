// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/exec.hpp"
#include "spikecp/ledger.hpp"
#include "spikecp/network.hpp"
#include "spikecp/schedule.hpp"

namespace spikecp {

struct EngineOptions {
  std::int64_t capacity_slots = 0;  // 0 = unlimited
  bool cross_check = false;         // compare replayed states against resident checkpoints
  bool inject_drop_spike = false;   // fault injection for the verification negative control
  ExecPolicy exec;
};

struct TrainingStepResult {
  float loss = 0.0f;
  Gradients<float> grads;
  MemoryLedger ledger;
  Tensor2<float> spike_counts;
  std::uint64_t spike_hash_post_forward = 0;
  std::uint64_t spike_hash_post_backward = 0;
  std::int64_t spike_events = 0;
};

// Replay timesteps [t0, t1) from the state at t0 using the cached spike record
// only: spike generation and sparse encoding never run here. out receives the
// states at t0 + k * keep_stride that fall inside the range (out[0] is a copy
// of the source); a zero-length range produces no output.
void recompute_chunk(const NetworkState<float>& source, int t0, int t1, const SpikeRecord& input,
                     const SpikeRecord& spikes, const Weights<float>& weights,
                     const NetworkConfig& cfg, int keep_stride,
                     std::vector<NetworkState<float>>& out, const ExecPolicy& exec = {},
                     OpCounters* ops = nullptr);

// One full training step under a checkpoint policy: forward pass storing
// states per plan(policy, T), loss, then the reverse sweep with exact
// recomputation. Gradients are bitwise equal to the Base strategy's for every
// policy; the ledger carries peaks, transfers, syncs, op counts and modeled
// time. Throws OomError when a capacity limit is exceeded.
TrainingStepResult run_training_step(const Weights<float>& weights, const SpikeRecord& input,
                                     const NetworkConfig& cfg, const LossSpec<float>& loss,
                                     const CheckpointPolicy& policy, const CostModel& costs,
                                     const EngineOptions& opts = {});

}  // namespace spikecp
