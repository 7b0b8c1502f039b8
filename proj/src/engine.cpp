// SPDX-License-Identifier: Apache-2.0
//
// Schedule executor for the five storage policies.
//
// Forward, every strategy:      states offered at t = 0..T-1, spikes cached.
//   base          store every state locally
//   standard      store states at k*chunk locally
//   remote        stage states at k*chunk through one local slot to remote
//   hierarchical  as remote, but the last nb_local checkpoints stay local
//   double        store states at k*remote_chunk to remote
//
// Backward, chunk [t0, t1) processed in reverse:
//   t0 checkpoint -> chunk buffer -> replay t0+1..t1-1 -> reverse sweep -> free
// Double inserts a per-segment regeneration pass first:
//   remote ckpt r0 -> local ckpt buffer [r0, r0+chunk, ...] -> chunks as above
//
// Buffers are charged at their full configured size (chunk, nb_local,
// remote/chunk slots) even when a ragged tail fills them partially, which is
// what keeps the measured peaks integer-equal to the analytic predictors.

#include "spikecp/engine.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "spikecp/predict.hpp"

namespace spikecp {

void recompute_chunk(const NetworkState<float>& source, int t0, int t1, const SpikeRecord& input,
                     const SpikeRecord& spikes, const Weights<float>& weights,
                     const NetworkConfig& cfg, int keep_stride,
                     std::vector<NetworkState<float>>& out, const ExecPolicy& exec,
                     OpCounters* ops) {
  out.clear();
  if (t1 <= t0) return;
  const int kept = static_cast<int>(ceil_div(t1 - t0, keep_stride));
  if (keep_stride == 1) {
    out.assign(kept, NetworkState<float>::zeros(cfg));
    out[0] = source;
    for (int k = 1; k < kept; ++k)
      lif_step(out[k - 1], out[k], input, spikes, t0 + k - 1, weights, cfg, exec, ops);
    return;
  }
  out.resize(kept);
  out[0] = source;
  if (kept == 1) return;
  NetworkState<float> walk = source;
  const int last_kept = t0 + (kept - 1) * keep_stride;
  for (int t = t0; t < last_kept; ++t) {
    lif_step(walk, walk, input, spikes, t, weights, cfg, exec, ops);
    if ((t + 1 - t0) % keep_stride == 0) out[(t + 1 - t0) / keep_stride] = walk;
  }
}

namespace {

using Cat = MemoryLedger::Category;

class StepExecutor {
 public:
  StepExecutor(const Weights<float>& weights, const SpikeRecord& input, const NetworkConfig& cfg,
               const LossSpec<float>& loss, const CheckpointPolicy& policy,
               const CostModel& costs, const EngineOptions& opts)
      : weights_(weights),
        input_(input),
        cfg_(cfg),
        loss_(loss),
        policy_(policy),
        costs_(costs),
        opts_(opts),
        schedule_(plan(policy, cfg.seq_len)),
        ledger_(cfg.virtual_tiles, opts.capacity_slots),
        spikes_(cfg.seq_len, cfg.num_layers, cfg.batch_size, cfg.neurons_per_layer),
        grads_(Gradients<float>::zeros(cfg)),
        spike_tile_slots_(cfg.virtual_tiles, 0) {
    m_s_ = cfg.state_slots();
    tc_micro_ = costs.tc_micro(m_s_);
    ts_micro_ = costs.ts_micro();
  }

  TrainingStepResult run() {
    charge_persistent();
    forward();
    if (opts_.inject_drop_spike) inject_fault();
    const std::uint64_t hash_fwd = spikes_.content_hash();
    backward();
    const std::uint64_t hash_bwd = spikes_.content_hash();
    release_persistent();
    ledger_.finalize();

    TrainingStepResult result;
    result.loss = loss_value_;
    result.grads = std::move(grads_);
    result.ledger = std::move(ledger_);
    result.spike_counts = std::move(counts_);
    result.spike_hash_post_forward = hash_fwd;
    result.spike_hash_post_backward = hash_bwd;
    result.spike_events = spikes_.total_events();
    return result;
  }

 private:
  // Storage sink wired into forward_sequence.
  class PolicyRecorder final : public StateRecorder<float> {
   public:
    explicit PolicyRecorder(StepExecutor& e) : e_(e) {}
    void record(int t, const NetworkState<float>& state) override { e_.offer_state(t, state); }

   private:
    StepExecutor& e_;
  };

  void charge_persistent() {
    ledger_.set_timestep(-1);
    ledger_.alloc(weights_.slot_count(), Cat::Weights);
    ledger_.alloc(grads_.slot_count(), Cat::Weights);
    ledger_.alloc(m_s_, Cat::State);  // the working state advanced in place
    // Loss bookkeeping: counts, targets, count adjoint.
    const std::int64_t bn = static_cast<std::int64_t>(cfg_.batch_size) * cfg_.neurons_per_layer;
    ledger_.alloc(2 * bn + cfg_.neurons_per_layer, Cat::Work);
    charge_input_events();

    switch (policy_.strategy) {
      case Strategy::Base:
      case Strategy::Standard:
        break;
      case Strategy::Remote:
        ledger_.alloc(m_s_, Cat::State);  // transfer staging slot
        break;
      case Strategy::Hierarchical:
        ledger_.alloc(policy_.nb_local * m_s_, Cat::State);  // fetched-batch residency
        break;
      case Strategy::Double:
        local_ckpts_per_segment_ = policy_.remote_chunk_size / policy_.chunk_size;
        ledger_.alloc(local_ckpts_per_segment_ * m_s_, Cat::State);
        break;
    }
  }

  void release_persistent() {
    ledger_.set_timestep(-1);
    switch (policy_.strategy) {
      case Strategy::Base:
        ledger_.free(static_cast<std::int64_t>(store_all_.size()) * m_s_, Cat::State);
        store_all_.clear();
        break;
      case Strategy::Standard:
        break;  // checkpoints freed chunk by chunk
      case Strategy::Remote:
        ledger_.free(m_s_, Cat::State);
        break;
      case Strategy::Hierarchical:
        ledger_.free(policy_.nb_local * m_s_, Cat::State);
        break;
      case Strategy::Double:
        ledger_.free(local_ckpts_per_segment_ * m_s_, Cat::State);
        break;
    }
    free_spike_events();
    const std::int64_t bn = static_cast<std::int64_t>(cfg_.batch_size) * cfg_.neurons_per_layer;
    ledger_.free(2 * bn + cfg_.neurons_per_layer, Cat::Work);
    ledger_.free(m_s_, Cat::State);
    ledger_.free(grads_.slot_count(), Cat::Weights);
    ledger_.free(weights_.slot_count(), Cat::Weights);
  }

  void charge_slice_events(const SpikeRecord& record, int t, int layer) {
    const int tile_span = cfg_.neurons_per_layer / cfg_.virtual_tiles;
    std::vector<std::int64_t> per_tile(cfg_.virtual_tiles, 0);
    for (std::uint32_t e : record.slice(t, layer))
      per_tile[record.event_neuron(e) / tile_span] += 1;
    for (int tile = 0; tile < cfg_.virtual_tiles; ++tile) {
      if (per_tile[tile] == 0) continue;
      ledger_.alloc_on_tile(per_tile[tile], tile, Cat::SpikeCache);
      spike_tile_slots_[tile] += per_tile[tile];
    }
  }

  void charge_input_events() {
    for (int t = 0; t < input_.num_steps(); ++t) charge_slice_events(input_, t, 0);
  }

  void charge_spike_cache() {
    for (int t = 0; t < cfg_.seq_len; ++t) {
      ledger_.set_timestep(t);
      for (int l = 0; l < cfg_.num_layers; ++l) charge_slice_events(spikes_, t, l);
    }
  }

  void free_spike_events() {
    for (int tile = 0; tile < cfg_.virtual_tiles; ++tile)
      if (spike_tile_slots_[tile] > 0)
        ledger_.free_on_tile(spike_tile_slots_[tile], tile, Cat::SpikeCache);
  }

  void offer_state(int t, const NetworkState<float>& state) {
    ledger_.set_timestep(t);
    switch (policy_.strategy) {
      case Strategy::Base:
        ledger_.alloc(m_s_, Cat::State);
        store_all_.push_back(state);
        break;
      case Strategy::Standard:
        if (t % policy_.chunk_size == 0) {
          ledger_.alloc(m_s_, Cat::State);
          local_ckpts_[t] = state;
        }
        break;
      case Strategy::Remote:
        if (t % policy_.chunk_size == 0) write_remote(t, state);
        break;
      case Strategy::Hierarchical:
        if (t % policy_.chunk_size == 0) {
          if (t >= schedule_.resident_from)
            local_ckpts_[t] = state;  // lives in the pre-charged batch buffer
          else
            remote_ckpts_[t] = state;  // movement cost charged in bulk, Eq. 10
        }
        break;
      case Strategy::Double:
        if (t % policy_.remote_chunk_size == 0) write_remote(t, state);
        break;
    }
  }

  void write_remote(int t, const NetworkState<float>& state) {
    remote_ckpts_[t] = state;
    ledger_.transfer_out(m_s_);
    ledger_.sync();
    ledger_.charge_time(tc_micro_ + ts_micro_);
  }

  void fetch_remote(int t, NetworkState<float>& dst) {
    auto it = remote_ckpts_.find(t);
    if (it == remote_ckpts_.end())
      throw ScheduleBugError("remote checkpoint at t=" + std::to_string(t) + " missing");
    dst = it->second;
    remote_ckpts_.erase(it);
    ledger_.transfer_in(m_s_);
    ledger_.sync();
    ledger_.charge_time(tc_micro_ + ts_micro_);
  }

  void forward() {
    PolicyRecorder recorder(*this);
    ForwardResult<float> fwd =
        forward_sequence(weights_, input_, cfg_, loss_, recorder, spikes_, opts_.exec,
                         &ledger_.ops);
    loss_value_ = fwd.loss;
    counts_ = std::move(fwd.spike_counts);
    charge_spike_cache();
    ledger_.charge_time(static_cast<std::int64_t>(cfg_.seq_len) * costs_.fwd_step_micro());

    if (policy_.strategy == Strategy::Hierarchical) {
      const auto f = policy_footprint(policy_, cfg_.seq_len);
      ledger_.bulk_comms(f.n_syncs / 2, policy_.nb_local, m_s_,
                         policy_.nb_local * tc_micro_ + ts_micro_, /*outbound=*/true);
    }
  }

  void inject_fault() {
    // Drop one cached spike from a timestep the backward pass must replay.
    for (int t = 0; t < cfg_.seq_len; ++t) {
      if (schedule_.is_checkpoint(t)) continue;
      for (int l = 0; l < cfg_.num_layers; ++l) {
        auto& slice = spikes_.slice(t, l);
        if (!slice.empty()) {
          slice.pop_back();
          return;
        }
      }
    }
  }

  // Replay [t0, t1) into the chunk buffer and reverse-sweep it. The buffer is
  // charged at full chunk_size regardless of the tail length.
  void process_chunk(const NetworkState<float>& source, int t0, int t1) {
    ledger_.set_timestep(t0);
    const int buffer_slots = policy_.chunk_size;
    ledger_.alloc(buffer_slots * m_s_, Cat::State);

    std::vector<NetworkState<float>> buffer;
    recompute_chunk(source, t0, t1, input_, spikes_, weights_, cfg_, 1, buffer, opts_.exec,
                    &ledger_.ops);
    ledger_.charge_time(static_cast<std::int64_t>(t1 - t0 - 1) * costs_.lif_micro());

    if (opts_.cross_check && cross_ref_t_ == t1) {
      // Verification probe: replay one uncounted, uncharged step past the
      // chunk end and compare against the pristine copy of the checkpoint the
      // previously processed chunk started from.
      NetworkState<float> probe = NetworkState<float>::zeros(cfg_);
      lif_step(buffer.back(), probe, input_, spikes_, t1 - 1, weights_, cfg_, opts_.exec, nullptr);
      if (!bitwise_equal(probe, cross_ref_state_))
        throw DeterminismViolationError(
            "replayed state diverged from stored checkpoint at t=" + std::to_string(t1), t1);
    }

    BufferStateView<float> view(&buffer, t0, static_cast<int>(buffer.size()));
    backward_chunk(view, t0, t1, input_, spikes_, weights_, cfg_, loss_adj_, adj_, ws_, grads_,
                   opts_.exec, &ledger_.ops);
    ledger_.charge_time(static_cast<std::int64_t>(t1 - t0) * costs_.bwd_micro());

    if (opts_.cross_check) {
      cross_ref_t_ = t0;
      cross_ref_state_ = buffer[0];
    }
    buffer.clear();
    ledger_.free(buffer_slots * m_s_, Cat::State);
  }

  void backward() {
    loss_adj_ = make_loss_adjoint(loss_, counts_, cfg_);
    adj_ = AdjointState<float>::zeros(cfg_);
    ws_ = BackwardWorkspace<float>::make(cfg_);
    seed_adjoint(loss_adj_, adj_);
    workspace_slots_ = adj_.slot_count() + ws_.slot_count();
    ledger_.alloc(workspace_slots_, Cat::Work);

    switch (policy_.strategy) {
      case Strategy::Base: backward_base(); break;
      case Strategy::Standard: backward_standard(); break;
      case Strategy::Remote: backward_remote(); break;
      case Strategy::Hierarchical: backward_hierarchical(); break;
      case Strategy::Double: backward_double(); break;
    }

    ledger_.free(workspace_slots_, Cat::Work);
  }

  void backward_base() {
    BufferStateView<float> view(&store_all_, 0, static_cast<int>(store_all_.size()));
    backward_chunk(view, 0, cfg_.seq_len, input_, spikes_, weights_, cfg_, loss_adj_, adj_, ws_,
                   grads_, opts_.exec, &ledger_.ops);
    ledger_.charge_time(static_cast<std::int64_t>(cfg_.seq_len) * costs_.bwd_micro());
  }

  void backward_standard() {
    for (auto it = schedule_.chunks.rbegin(); it != schedule_.chunks.rend(); ++it) {
      const NetworkState<float>& src = local_ckpts_.at(it->source_t);
      process_chunk(src, it->t0, it->t1);
      local_ckpts_.erase(it->source_t);
      ledger_.free(m_s_, Cat::State);
    }
  }

  void backward_remote() {
    NetworkState<float> staging;  // occupies the slot charged at start
    for (auto it = schedule_.chunks.rbegin(); it != schedule_.chunks.rend(); ++it) {
      ledger_.set_timestep(it->source_t);
      fetch_remote(it->source_t, staging);
      process_chunk(staging, it->t0, it->t1);
    }
  }

  void backward_hierarchical() {
    // Communication charged per the paper's batched accounting, not per fetch.
    const auto f = policy_footprint(policy_, cfg_.seq_len);
    ledger_.bulk_comms(f.n_syncs / 2, policy_.nb_local, m_s_,
                       policy_.nb_local * tc_micro_ + ts_micro_, /*outbound=*/false);

    for (auto it = schedule_.chunks.rbegin(); it != schedule_.chunks.rend(); ++it) {
      if (local_ckpts_.find(it->source_t) == local_ckpts_.end()) {
        // Previous batch fully consumed; pull the next nb_local checkpoints.
        int needed = policy_.nb_local;
        for (int t = it->source_t; t >= 0 && needed > 0; t -= policy_.chunk_size, --needed) {
          auto rit = remote_ckpts_.find(t);
          if (rit == remote_ckpts_.end())
            throw ScheduleBugError("hierarchical batch fetch missing checkpoint t=" +
                                   std::to_string(t));
          local_ckpts_[t] = std::move(rit->second);
          remote_ckpts_.erase(rit);
        }
      }
      const NetworkState<float>& src = local_ckpts_.at(it->source_t);
      process_chunk(src, it->t0, it->t1);
      local_ckpts_.erase(it->source_t);
    }
  }

  void backward_double() {
    std::vector<NetworkState<float>> local_buf;  // pre-charged checkpoint buffer
    for (auto seg = schedule_.segments.rbegin(); seg != schedule_.segments.rend(); ++seg) {
      ledger_.set_timestep(seg->r0);
      NetworkState<float> remote_state;
      fetch_remote(seg->r0, remote_state);

      // Regeneration pass: materialize the segment's local checkpoints.
      const int locals = static_cast<int>(seg->chunks.size());
      if (locals > 1) ledger_.alloc(m_s_, Cat::State);  // replay cursor
      recompute_chunk(remote_state, seg->r0, seg->r1, input_, spikes_, weights_, cfg_,
                      policy_.chunk_size, local_buf, opts_.exec, &ledger_.ops);
      ledger_.charge_time(static_cast<std::int64_t>(locals - 1) * policy_.chunk_size *
                          costs_.lif_micro());
      if (locals > 1) ledger_.free(m_s_, Cat::State);

      for (int j = locals - 1; j >= 0; --j) {
        const BackwardChunk& c = seg->chunks[j];
        process_chunk(local_buf[j], c.t0, c.t1);
      }
      local_buf.clear();
    }
  }

  const Weights<float>& weights_;
  const SpikeRecord& input_;
  const NetworkConfig& cfg_;
  const LossSpec<float>& loss_;
  const CheckpointPolicy& policy_;
  const CostModel& costs_;
  const EngineOptions& opts_;
  Schedule schedule_;
  MemoryLedger ledger_;
  SpikeRecord spikes_;
  Gradients<float> grads_;

  std::int64_t m_s_ = 0;
  std::int64_t tc_micro_ = 0;
  std::int64_t ts_micro_ = 0;
  std::int64_t workspace_slots_ = 0;
  std::vector<std::int64_t> spike_tile_slots_;
  int local_ckpts_per_segment_ = 0;

  std::vector<NetworkState<float>> store_all_;
  std::map<int, NetworkState<float>> local_ckpts_;
  std::map<int, NetworkState<float>> remote_ckpts_;

  int cross_ref_t_ = -1;
  NetworkState<float> cross_ref_state_;

  float loss_value_ = 0.0f;
  Tensor2<float> counts_;
  LossAdjoint<float> loss_adj_;
  AdjointState<float> adj_;
  BackwardWorkspace<float> ws_;
};

}  // namespace

TrainingStepResult run_training_step(const Weights<float>& weights, const SpikeRecord& input,
                                     const NetworkConfig& cfg, const LossSpec<float>& loss,
                                     const CheckpointPolicy& policy, const CostModel& costs,
                                     const EngineOptions& opts) {
  cfg.validate();
  costs.validate();
  if (input.num_steps() != cfg.seq_len || input.num_neurons() != cfg.neurons_per_layer ||
      input.batch() != cfg.batch_size)
    throw ConfigError("input spike record shape does not match the network config");
  if (loss.kind == LossKind::SpikeCountMse &&
      static_cast<int>(loss.target_counts.size()) != cfg.neurons_per_layer)
    throw ConfigError("target_counts length must equal neurons_per_layer");
  StepExecutor executor(weights, input, cfg, loss, policy, costs, opts);
  return executor.run();
}

}  // namespace spikecp
