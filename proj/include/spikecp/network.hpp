// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/exec.hpp"
#include "spikecp/spikes.hpp"
#include "spikecp/state.hpp"
#include "spikecp/weights.hpp"

namespace spikecp {

// Work counters. Forward steps pay spike generation and sparse encoding;
// recomputation pays lif steps only, which is what makes checkpoint replay
// cheaper than the original forward pass.
struct OpCounters {
  std::int64_t lif_steps = 0;
  std::int64_t spike_gen_calls = 0;
  std::int64_t encode_calls = 0;
  std::int64_t matmul_events = 0;
};

enum class LossKind {
  SpikeCountMse,  // MSE between last-layer per-neuron spike counts and a target vector
  MembraneMean,   // mean membrane potential over all layers and steps (smooth; for FD oracles)
};

template <typename T>
struct LossSpec {
  LossKind kind = LossKind::SpikeCountMse;
  std::vector<T> target_counts;  // length neurons_per_layer; SpikeCountMse only
};

// Surrogate derivative of the spike threshold: 1 / (beta*|x| + 1)^2.
// Even, strictly positive, peak value 1 at x = 0.
template <typename T>
inline T surrogate_grad(T v_minus_theta, T beta) {
  const T d = beta * (v_minus_theta < T(0) ? -v_minus_theta : v_minus_theta) + T(1);
  return T(1) / (d * d);
}

// Advance all layers one timestep. For each layer
//   i' = decay_i * i + W_in * s_pre + W_rec * s_self
//   v' = decay_v * v + i' - theta * s_self        (reset by subtraction)
// where s_pre / s_self are the cached spike slices at t (input record feeds
// layer 0). src and dst may alias. Accumulation per element is canonical:
// decay term first, then input events, then recurrent events, ascending.
template <typename T>
void lif_step(const NetworkState<T>& src, NetworkState<T>& dst, const SpikeRecord& input,
              const SpikeRecord& spikes, int t, const Weights<T>& weights,
              const NetworkConfig& cfg, const ExecPolicy& exec = {}, OpCounters* ops = nullptr);

// Emit (b, n) for every cell with v >= theta into record slices (t, layer),
// in canonical ascending order. Counted as one spike-gen plus one encode call.
template <typename T>
void spike_generate(const NetworkState<T>& state, const NetworkConfig& cfg, int t,
                    SpikeRecord& record, const ExecPolicy& exec = {}, OpCounters* ops = nullptr);

// Forward-pass state sink. Offered every pre-step state S_t, t in [0, T);
// implementations store or drop per policy.
template <typename T>
class StateRecorder {
 public:
  virtual ~StateRecorder() = default;
  virtual void record(int t, const NetworkState<T>& state) = 0;
};

template <typename T>
class NullRecorder final : public StateRecorder<T> {
 public:
  void record(int, const NetworkState<T>&) override {}
};

template <typename T>
class StoreAllRecorder final : public StateRecorder<T> {
 public:
  void record(int t, const NetworkState<T>& state) override {
    if (t == static_cast<int>(states_.size()))
      states_.push_back(state);
    else
      states_[t] = state;
  }
  const std::vector<NetworkState<T>>& states() const { return states_; }

 private:
  std::vector<NetworkState<T>> states_;
};

template <typename T>
struct ForwardResult {
  NetworkState<T> final_state;
  T loss = T(0);
  Tensor2<T> spike_counts;  // last layer, [batch x neurons]
};

// Run T spike_generate / lif_step pairs from the zero initial state. Every
// spike slice lands in `spikes` (the full-sequence cache); states are offered
// to the recorder. `spikes` must be an empty record of shape (T, L).
template <typename T>
ForwardResult<T> forward_sequence(const Weights<T>& weights, const SpikeRecord& input,
                                  const NetworkConfig& cfg, const LossSpec<T>& loss,
                                  StateRecorder<T>& recorder, SpikeRecord& spikes,
                                  const ExecPolicy& exec = {}, OpCounters* ops = nullptr);

// Adjoints of one network state (dL/dv, dL/di), layer-indexed like NetworkState.
template <typename T>
struct AdjointState {
  std::vector<Tensor2<T>> av;
  std::vector<Tensor2<T>> ai;

  static AdjointState zeros(const NetworkConfig& cfg) {
    AdjointState a;
    for (int l = 0; l < cfg.num_layers; ++l) {
      a.av.emplace_back(cfg.batch_size, cfg.neurons_per_layer);
      a.ai.emplace_back(cfg.batch_size, cfg.neurons_per_layer);
    }
    return a;
  }
  std::int64_t slot_count() const {
    std::int64_t n = 0;
    for (const auto& x : av) n += x.size();
    for (const auto& x : ai) n += x.size();
    return n;
  }
};

// Loss terms injected during the reverse sweep.
template <typename T>
struct LossAdjoint {
  LossKind kind = LossKind::SpikeCountMse;
  Tensor2<T> count_adjoint;        // dL/d(spike count), last layer
  T membrane_direct = T(0);        // per-element direct dL/dv term (MembraneMean)
};

// Scratch for the reverse sweep; sized once, constant across policies.
template <typename T>
struct BackwardWorkspace {
  std::vector<Tensor2<T>> g;  // adjoint of the freshly computed current i_{t+1}
  Tensor2<T> s_adj;           // dense adjoint of the spike slice of one layer

  static BackwardWorkspace make(const NetworkConfig& cfg) {
    BackwardWorkspace w;
    for (int l = 0; l < cfg.num_layers; ++l) w.g.emplace_back(cfg.batch_size, cfg.neurons_per_layer);
    w.s_adj = Tensor2<T>(cfg.batch_size, cfg.neurons_per_layer);
    return w;
  }
  std::int64_t slot_count() const {
    std::int64_t n = s_adj.size();
    for (const auto& x : g) n += x.size();
    return n;
  }
};

// One reverse timestep: consumes the adjoint of S_{t+1} in `adj`, leaves the
// adjoint of S_t there, and accumulates weight gradients in place. The
// accumulation order is fixed (descending t outside, ascending layer inside),
// which is what makes chunked and monolithic backward passes bit-identical.
template <typename T>
void backward_step(const NetworkState<T>& state_t, const SpikeRecord& input,
                   const SpikeRecord& spikes, int t, const Weights<T>& weights,
                   const NetworkConfig& cfg, const LossAdjoint<T>& loss_adj,
                   AdjointState<T>& adj, BackwardWorkspace<T>& ws, Gradients<T>& grads,
                   const ExecPolicy& exec = {}, OpCounters* ops = nullptr);

// Read access to the states a backward chunk consumes. Throws ScheduleBugError
// for a timestep the executor never materialized.
template <typename T>
class StateView {
 public:
  virtual ~StateView() = default;
  virtual const NetworkState<T>& at(int t) const = 0;
};

// Contiguous states [t0, t0 + n) backed by a vector, with presence tracking.
template <typename T>
class BufferStateView final : public StateView<T> {
 public:
  BufferStateView(const std::vector<NetworkState<T>>* states, int t0, int n)
      : states_(states), t0_(t0), n_(n) {}
  const NetworkState<T>& at(int t) const override;

 private:
  const std::vector<NetworkState<T>>* states_;
  int t0_;
  int n_;
};

// Reverse-accumulate over timesteps [t0, t1); adj must hold the adjoint of
// S_t1 on entry and holds the adjoint of S_t0 on exit.
template <typename T>
void backward_chunk(const StateView<T>& states, int t0, int t1, const SpikeRecord& input,
                    const SpikeRecord& spikes, const Weights<T>& weights,
                    const NetworkConfig& cfg, const LossAdjoint<T>& loss_adj,
                    AdjointState<T>& adj, BackwardWorkspace<T>& ws, Gradients<T>& grads,
                    const ExecPolicy& exec = {}, OpCounters* ops = nullptr);

// Loss-side helpers shared by the engine and the oracles.
template <typename T>
T spike_count_mse(const Tensor2<T>& counts, const std::vector<T>& targets);

template <typename T>
LossAdjoint<T> make_loss_adjoint(const LossSpec<T>& loss, const Tensor2<T>& counts,
                                 const NetworkConfig& cfg);

// Initial adjoint of S_T for the given loss (zero, or the membrane direct term).
template <typename T>
void seed_adjoint(const LossAdjoint<T>& loss_adj, AdjointState<T>& adj);

}  // namespace spikecp
