// SPDX-License-Identifier: Apache-2.0
//
// Forward / backward kernels for the sparse recurrent LIF network.
//
// Every kernel is written as a column-range worker shared by the serial and
// OpenMP lanes: threads partition output columns, each element is produced by
// exactly one thread, and per-element accumulation order (decay term, then
// input events, then recurrent events, ascending) never depends on the
// partition. That is the whole determinism story: serial, parallel, in-place
// and out-of-place call sites all run the same per-element op sequence.

#include "spikecp/network.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <string>

#include "spikecp/errors.hpp"

#ifdef SPIKECP_HAVE_OPENMP
#include <omp.h>
#endif

namespace spikecp {
namespace {

template <typename F>
void run_cols(const ExecPolicy& exec, int n_total, F&& worker) {
#ifdef SPIKECP_HAVE_OPENMP
  if (exec.parallel && n_total > 1) {
    const int req = exec.threads > 0 ? exec.threads : omp_get_max_threads();
    const int nt = std::max(1, std::min(req, n_total));
#pragma omp parallel num_threads(nt)
    {
      const int id = omp_get_thread_num();
      const int p = omp_get_num_threads();
      const int base = n_total / p;
      const int rem = n_total % p;
      const int n0 = id * base + std::min(id, rem);
      const int n1 = n0 + base + (id < rem ? 1 : 0);
      if (n0 < n1) worker(n0, n1);
    }
    return;
  }
#else
  (void)exec;
#endif
  worker(0, n_total);
}

// i' = decay * i + sum of presynaptic rows, columns [n0, n1). Alias-safe.
template <typename T>
void current_update_cols(const Tensor2<T>& i_src, Tensor2<T>& i_dst, T decay,
                         const std::vector<std::uint32_t>& pre_events, const Tensor2<T>& w_in,
                         const std::vector<std::uint32_t>& rec_events, const Tensor2<T>& w_rec,
                         int neurons, int n0, int n1) {
  const int batch = i_src.rows();
  for (int b = 0; b < batch; ++b) {
    const T* src = i_src.row(b);
    T* dst = i_dst.row(b);
    for (int n = n0; n < n1; ++n) dst[n] = decay * src[n];
  }
  for (std::uint32_t e : pre_events) {
    const int b = static_cast<int>(e) / neurons;
    const int p = static_cast<int>(e) % neurons;
    const T* wrow = w_in.row(p);
    T* dst = i_dst.row(b);
    for (int n = n0; n < n1; ++n) dst[n] += wrow[n];
  }
  for (std::uint32_t e : rec_events) {
    const int b = static_cast<int>(e) / neurons;
    const int p = static_cast<int>(e) % neurons;
    const T* wrow = w_rec.row(p);
    T* dst = i_dst.row(b);
    for (int n = n0; n < n1; ++n) dst[n] += wrow[n];
  }
}

// v' = decay * v + i' , then reset-by-subtraction on cells that fired at t.
template <typename T>
void potential_update_cols(const Tensor2<T>& v_src, Tensor2<T>& v_dst, const Tensor2<T>& i_new,
                           T decay, T theta, const std::vector<std::uint32_t>& rec_events,
                           int neurons, int n0, int n1) {
  const int batch = v_src.rows();
  for (int b = 0; b < batch; ++b) {
    const T* src = v_src.row(b);
    const T* cur = i_new.row(b);
    T* dst = v_dst.row(b);
    for (int n = n0; n < n1; ++n) dst[n] = decay * src[n] + cur[n];
  }
  for (std::uint32_t e : rec_events) {
    const int n = static_cast<int>(e) % neurons;
    if (n < n0 || n >= n1) continue;
    const int b = static_cast<int>(e) / neurons;
    v_dst.row(b)[n] -= theta;
  }
}

template <typename T>
void check_finite(const Tensor2<T>& v, const Tensor2<T>& i, int layer, int t) {
  if (!v.all_finite() || !i.all_finite())
    throw NumericOverflowError("non-finite state in layer " + std::to_string(layer) +
                                   " at timestep " + std::to_string(t),
                               layer, t);
}

}  // namespace

template <typename T>
void lif_step(const NetworkState<T>& src, NetworkState<T>& dst, const SpikeRecord& input,
              const SpikeRecord& spikes, int t, const Weights<T>& weights,
              const NetworkConfig& cfg, const ExecPolicy& exec, OpCounters* ops) {
  const int neurons = cfg.neurons_per_layer;
  std::int64_t events = 0;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const std::vector<std::uint32_t>& pre = l == 0 ? input.slice(t, 0) : spikes.slice(t, l - 1);
    const std::vector<std::uint32_t>& rec = spikes.slice(t, l);
    events += static_cast<std::int64_t>(pre.size()) + static_cast<std::int64_t>(rec.size());
    run_cols(exec, neurons, [&](int n0, int n1) {
      current_update_cols(src.i[l], dst.i[l], static_cast<T>(cfg.decay_i), pre,
                          weights.layers[l].w_in, rec, weights.layers[l].w_rec, neurons, n0, n1);
    });
    run_cols(exec, neurons, [&](int n0, int n1) {
      potential_update_cols(src.v[l], dst.v[l], dst.i[l], static_cast<T>(cfg.decay_v),
                            static_cast<T>(cfg.threshold), rec, neurons, n0, n1);
    });
    check_finite(dst.v[l], dst.i[l], l, t);
  }
  if (ops) {
    ops->lif_steps += 1;
    ops->matmul_events += events;
  }
}

template <typename T>
void spike_generate(const NetworkState<T>& state, const NetworkConfig& cfg, int t,
                    SpikeRecord& record, const ExecPolicy& exec, OpCounters* ops) {
  const T theta = static_cast<T>(cfg.threshold);
  const int neurons = cfg.neurons_per_layer;
  const int batch = cfg.batch_size;
  for (int l = 0; l < cfg.num_layers; ++l) {
    std::vector<std::uint32_t>& out = record.slice(t, l);
    assert(out.empty());
    const Tensor2<T>& v = state.v[l];
    // Two passes keep the canonical (batch, neuron) order under the parallel
    // lane: count per batch row, prefix, then fill at fixed offsets.
    std::vector<int> counts(batch, 0);
    run_cols(exec, batch, [&](int b0, int b1) {
      for (int b = b0; b < b1; ++b) {
        const T* row = v.row(b);
        int c = 0;
        for (int n = 0; n < neurons; ++n)
          if (row[n] >= theta) ++c;
        counts[b] = c;
      }
    });
    std::vector<int> offsets(batch + 1, 0);
    for (int b = 0; b < batch; ++b) offsets[b + 1] = offsets[b] + counts[b];
    out.resize(offsets[batch]);
    run_cols(exec, batch, [&](int b0, int b1) {
      for (int b = b0; b < b1; ++b) {
        const T* row = v.row(b);
        std::uint32_t* dst = out.data() + offsets[b];
        for (int n = 0; n < neurons; ++n)
          if (row[n] >= theta) *dst++ = record.pack(b, n);
      }
    });
  }
  if (ops) {
    ops->spike_gen_calls += 1;
    ops->encode_calls += 1;
  }
}

template <typename T>
T spike_count_mse(const Tensor2<T>& counts, const std::vector<T>& targets) {
  T acc = T(0);
  for (int b = 0; b < counts.rows(); ++b) {
    const T* row = counts.row(b);
    for (int n = 0; n < counts.cols(); ++n) {
      const T d = row[n] - targets[n];
      acc += d * d;
    }
  }
  return acc / static_cast<T>(counts.size());
}

template <typename T>
ForwardResult<T> forward_sequence(const Weights<T>& weights, const SpikeRecord& input,
                                  const NetworkConfig& cfg, const LossSpec<T>& loss,
                                  StateRecorder<T>& recorder, SpikeRecord& spikes,
                                  const ExecPolicy& exec, OpCounters* ops) {
  const int steps = cfg.seq_len;
  const int last = cfg.num_layers - 1;
  NetworkState<T> state = NetworkState<T>::zeros(cfg);
  Tensor2<T> counts(cfg.batch_size, cfg.neurons_per_layer);
  T membrane_acc = T(0);

  for (int t = 0; t < steps; ++t) {
    recorder.record(t, state);
    spike_generate(state, cfg, t, spikes, exec, ops);
    for (std::uint32_t e : spikes.slice(t, last))
      counts.at(spikes.event_batch(e), spikes.event_neuron(e)) += T(1);
    lif_step(state, state, input, spikes, t, weights, cfg, exec, ops);
    if (loss.kind == LossKind::MembraneMean) {
      for (int l = 0; l < cfg.num_layers; ++l) {
        const T* data = state.v[l].data();
        const std::int64_t sz = state.v[l].size();
        for (std::int64_t k = 0; k < sz; ++k) membrane_acc += data[k];
      }
    }
  }

  ForwardResult<T> result;
  if (loss.kind == LossKind::SpikeCountMse) {
    result.loss = spike_count_mse(counts, loss.target_counts);
  } else {
    const T denom = static_cast<T>(steps) * static_cast<T>(cfg.num_layers) *
                    static_cast<T>(cfg.batch_size) * static_cast<T>(cfg.neurons_per_layer);
    result.loss = membrane_acc / denom;
  }
  result.final_state = std::move(state);
  result.spike_counts = std::move(counts);
  return result;
}

template <typename T>
LossAdjoint<T> make_loss_adjoint(const LossSpec<T>& loss, const Tensor2<T>& counts,
                                 const NetworkConfig& cfg) {
  LossAdjoint<T> adj;
  adj.kind = loss.kind;
  if (loss.kind == LossKind::SpikeCountMse) {
    adj.count_adjoint = Tensor2<T>(cfg.batch_size, cfg.neurons_per_layer);
    const T denom = static_cast<T>(counts.size());
    for (int b = 0; b < counts.rows(); ++b)
      for (int n = 0; n < counts.cols(); ++n)
        adj.count_adjoint.at(b, n) = (T(2) * (counts.at(b, n) - loss.target_counts[n])) / denom;
  } else {
    adj.membrane_direct = T(1) / (static_cast<T>(cfg.seq_len) * static_cast<T>(cfg.num_layers) *
                                  static_cast<T>(cfg.batch_size) *
                                  static_cast<T>(cfg.neurons_per_layer));
  }
  return adj;
}

template <typename T>
void seed_adjoint(const LossAdjoint<T>& loss_adj, AdjointState<T>& adj) {
  for (auto& x : adj.av) x.fill(loss_adj.kind == LossKind::MembraneMean ? loss_adj.membrane_direct : T(0));
  for (auto& x : adj.ai) x.fill(T(0));
}

namespace {

// s_adj[b,n] = W_rec[n,:] . g_l[b,:]  (+ W_in_next[n,:] . g_next[b,:])
//              - theta * av[b,n]      (+ count adjoint on the last layer)
template <typename T>
void spike_adjoint_cols(Tensor2<T>& s_adj, const Tensor2<T>& g_l, const Tensor2<T>& w_rec,
                        const Tensor2<T>* g_next, const Tensor2<T>* w_in_next,
                        const Tensor2<T>& av_l, T theta, const Tensor2<T>* count_adj,
                        int n0, int n1) {
  const int batch = g_l.rows();
  const int neurons = g_l.cols();
  for (int b = 0; b < batch; ++b) {
    const T* grow = g_l.row(b);
    const T* gnext = g_next ? g_next->row(b) : nullptr;
    const T* avrow = av_l.row(b);
    const T* crow = count_adj ? count_adj->row(b) : nullptr;
    T* out = s_adj.row(b);
    for (int n = n0; n < n1; ++n) {
      const T* wrow = w_rec.row(n);
      T acc = T(0);
      for (int k = 0; k < neurons; ++k) acc += wrow[k] * grow[k];
      if (gnext) {
        const T* wnext = w_in_next->row(n);
        for (int k = 0; k < neurons; ++k) acc += wnext[k] * gnext[k];
      }
      acc -= theta * avrow[n];
      if (crow) acc += crow[n];
      out[n] = acc;
    }
  }
}

template <typename T>
void grad_accumulate_cols(Tensor2<T>& gw, const std::vector<std::uint32_t>& events,
                          const Tensor2<T>& g_l, int neurons, int n0, int n1) {
  for (std::uint32_t e : events) {
    const int b = static_cast<int>(e) / neurons;
    const int p = static_cast<int>(e) % neurons;
    const T* grow = g_l.row(b);
    T* out = gw.row(p);
    for (int n = n0; n < n1; ++n) out[n] += grow[n];
  }
}

}  // namespace

template <typename T>
void backward_step(const NetworkState<T>& state_t, const SpikeRecord& input,
                   const SpikeRecord& spikes, int t, const Weights<T>& weights,
                   const NetworkConfig& cfg, const LossAdjoint<T>& loss_adj,
                   AdjointState<T>& adj, BackwardWorkspace<T>& ws, Gradients<T>& grads,
                   const ExecPolicy& exec, OpCounters* ops) {
  (void)ops;
  const int layers = cfg.num_layers;
  const int neurons = cfg.neurons_per_layer;
  const T theta = static_cast<T>(cfg.threshold);
  const T beta = static_cast<T>(cfg.surrogate_beta);
  const T decay_v = static_cast<T>(cfg.decay_v);
  const T decay_i = static_cast<T>(cfg.decay_i);
  // Direct membrane term applies to states S_1..S_T; S_0 is the fixed initial state.
  const T mem_direct =
      (loss_adj.kind == LossKind::MembraneMean && t >= 1) ? loss_adj.membrane_direct : T(0);

  // g[l] = adjoint of the current i_{t+1} computed inside step t: carries the
  // state-carry path (ai) plus the use of i_{t+1} in v_{t+1} (av).
  for (int l = 0; l < layers; ++l) {
    const Tensor2<T>& av = adj.av[l];
    const Tensor2<T>& ai = adj.ai[l];
    Tensor2<T>& g = ws.g[l];
    run_cols(exec, neurons, [&](int n0, int n1) {
      for (int b = 0; b < cfg.batch_size; ++b) {
        const T* a = av.row(b);
        const T* c = ai.row(b);
        T* out = g.row(b);
        for (int n = n0; n < n1; ++n) out[n] = c[n] + a[n];
      }
    });
  }

  for (int l = 0; l < layers; ++l) {
    const bool has_next = l + 1 < layers;
    const bool loss_here =
        loss_adj.kind == LossKind::SpikeCountMse && l == layers - 1;
    run_cols(exec, neurons, [&](int n0, int n1) {
      spike_adjoint_cols(ws.s_adj, ws.g[l], weights.layers[l].w_rec,
                         has_next ? &ws.g[l + 1] : nullptr,
                         has_next ? &weights.layers[l + 1].w_in : nullptr, adj.av[l], theta,
                         loss_here ? &loss_adj.count_adjoint : nullptr, n0, n1);
    });

    const std::vector<std::uint32_t>& pre = l == 0 ? input.slice(t, 0) : spikes.slice(t, l - 1);
    const std::vector<std::uint32_t>& rec = spikes.slice(t, l);
    run_cols(exec, neurons, [&](int n0, int n1) {
      grad_accumulate_cols(grads.layers[l].w_in, pre, ws.g[l], neurons, n0, n1);
    });
    run_cols(exec, neurons, [&](int n0, int n1) {
      grad_accumulate_cols(grads.layers[l].w_rec, rec, ws.g[l], neurons, n0, n1);
    });

    // New adjoints for S_t. av[l] is consumed by s_adj above, safe to overwrite now.
    run_cols(exec, neurons, [&](int n0, int n1) {
      for (int b = 0; b < cfg.batch_size; ++b) {
        const T* vrow = state_t.v[l].row(b);
        const T* srow = ws.s_adj.row(b);
        const T* grow = ws.g[l].row(b);
        T* av = adj.av[l].row(b);
        T* ai = adj.ai[l].row(b);
        for (int n = n0; n < n1; ++n) {
          av[n] = decay_v * av[n] + surrogate_grad(vrow[n] - theta, beta) * srow[n] + mem_direct;
          ai[n] = decay_i * grow[n];
        }
      }
    });
  }
}

template <typename T>
const NetworkState<T>& BufferStateView<T>::at(int t) const {
  const int idx = t - t0_;
  if (idx < 0 || idx >= n_)
    throw ScheduleBugError("backward chunk requested state at t=" + std::to_string(t) +
                           " outside materialized range [" + std::to_string(t0_) + ", " +
                           std::to_string(t0_ + n_) + ")");
  return (*states_)[idx];
}

template <typename T>
void backward_chunk(const StateView<T>& states, int t0, int t1, const SpikeRecord& input,
                    const SpikeRecord& spikes, const Weights<T>& weights,
                    const NetworkConfig& cfg, const LossAdjoint<T>& loss_adj,
                    AdjointState<T>& adj, BackwardWorkspace<T>& ws, Gradients<T>& grads,
                    const ExecPolicy& exec, OpCounters* ops) {
  for (int t = t1 - 1; t >= t0; --t)
    backward_step(states.at(t), input, spikes, t, weights, cfg, loss_adj, adj, ws, grads, exec,
                  ops);
}

std::uint64_t gradient_checksum(const Gradients<float>& g) {
  std::uint64_t sum = 0;
  std::uint64_t index = 0;
  auto mix = [&](const Tensor2<float>& t) {
    for (std::int64_t k = 0; k < t.size(); ++k, ++index) {
      std::uint32_t bits;
      std::memcpy(&bits, t.data() + k, sizeof(bits));
      std::uint64_t z = index * 0x9e3779b97f4a7c15ull + bits;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      sum += z ^ (z >> 31);
    }
  };
  for (const auto& l : g.layers) {
    mix(l.w_in);
    mix(l.w_rec);
  }
  return sum;
}

#define SPIKECP_INSTANTIATE(T)                                                                    \
  template void lif_step<T>(const NetworkState<T>&, NetworkState<T>&, const SpikeRecord&,        \
                            const SpikeRecord&, int, const Weights<T>&, const NetworkConfig&,    \
                            const ExecPolicy&, OpCounters*);                                      \
  template void spike_generate<T>(const NetworkState<T>&, const NetworkConfig&, int,             \
                                  SpikeRecord&, const ExecPolicy&, OpCounters*);                  \
  template T spike_count_mse<T>(const Tensor2<T>&, const std::vector<T>&);                        \
  template ForwardResult<T> forward_sequence<T>(const Weights<T>&, const SpikeRecord&,           \
                                                const NetworkConfig&, const LossSpec<T>&,        \
                                                StateRecorder<T>&, SpikeRecord&,                 \
                                                const ExecPolicy&, OpCounters*);                  \
  template LossAdjoint<T> make_loss_adjoint<T>(const LossSpec<T>&, const Tensor2<T>&,            \
                                               const NetworkConfig&);                             \
  template void seed_adjoint<T>(const LossAdjoint<T>&, AdjointState<T>&);                         \
  template void backward_step<T>(const NetworkState<T>&, const SpikeRecord&, const SpikeRecord&, \
                                 int, const Weights<T>&, const NetworkConfig&,                   \
                                 const LossAdjoint<T>&, AdjointState<T>&, BackwardWorkspace<T>&, \
                                 Gradients<T>&, const ExecPolicy&, OpCounters*);                  \
  template class BufferStateView<T>;                                                              \
  template void backward_chunk<T>(const StateView<T>&, int, int, const SpikeRecord&,             \
                                  const SpikeRecord&, const Weights<T>&, const NetworkConfig&,   \
                                  const LossAdjoint<T>&, AdjointState<T>&, BackwardWorkspace<T>&,\
                                  Gradients<T>&, const ExecPolicy&, OpCounters*);

SPIKECP_INSTANTIATE(float)
SPIKECP_INSTANTIATE(double)

#undef SPIKECP_INSTANTIATE

}  // namespace spikecp
