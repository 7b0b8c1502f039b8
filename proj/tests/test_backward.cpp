// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spikecp/errors.hpp"
#include "spikecp/network.hpp"
#include "test_util.hpp"

using namespace spikecp;
using namespace spikecp::testutil;

namespace {

struct Trace {
  std::vector<NetworkState<float>> states;
  SpikeRecord spikes;
  ForwardResult<float> fwd;
};

Trace run_forward(const Instance& inst) {
  Trace tr;
  tr.spikes = SpikeRecord(inst.cfg.seq_len, inst.cfg.num_layers, inst.cfg.batch_size,
                          inst.cfg.neurons_per_layer);
  StoreAllRecorder<float> rec;
  tr.fwd = forward_sequence(inst.weights, inst.task.inputs, inst.cfg, inst.loss, rec, tr.spikes);
  tr.states = rec.states();
  return tr;
}

Gradients<float> backward_chunked(const Instance& inst, const Trace& tr, int chunk) {
  Gradients<float> grads = Gradients<float>::zeros(inst.cfg);
  LossAdjoint<float> ladj = make_loss_adjoint(inst.loss, tr.fwd.spike_counts, inst.cfg);
  AdjointState<float> adj = AdjointState<float>::zeros(inst.cfg);
  BackwardWorkspace<float> ws = BackwardWorkspace<float>::make(inst.cfg);
  seed_adjoint(ladj, adj);
  BufferStateView<float> view(&tr.states, 0, static_cast<int>(tr.states.size()));
  const int T = inst.cfg.seq_len;
  for (int t1 = T; t1 > 0;) {
    const int t0 = std::max(0, t1 - chunk);
    backward_chunk(view, t0, t1, inst.task.inputs, tr.spikes, inst.weights, inst.cfg, ladj, adj,
                   ws, grads);
    t1 = t0;
  }
  return grads;
}

}  // namespace

TEST_CASE("backward: zero adjoint and zero loss terms give zero gradients") {
  Instance inst = make_instance(17, 16, 2, 8, 2);
  Trace tr = run_forward(inst);

  LossAdjoint<float> ladj;
  ladj.kind = LossKind::SpikeCountMse;
  ladj.count_adjoint = Tensor2<float>(inst.cfg.batch_size, inst.cfg.neurons_per_layer);
  Gradients<float> grads = Gradients<float>::zeros(inst.cfg);
  AdjointState<float> adj = AdjointState<float>::zeros(inst.cfg);
  BackwardWorkspace<float> ws = BackwardWorkspace<float>::make(inst.cfg);
  BufferStateView<float> view(&tr.states, 0, static_cast<int>(tr.states.size()));
  backward_chunk(view, 0, inst.cfg.seq_len, inst.task.inputs, tr.spikes, inst.weights, inst.cfg,
                 ladj, adj, ws, grads);
  CHECK(bitwise_equal(grads, Gradients<float>::zeros(inst.cfg)));
}

TEST_CASE("backward: chunked reverse sweeps equal the monolithic sweep bitwise") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Instance inst = make_instance(seed, 37, 2, 8, 2);
    Trace tr = run_forward(inst);
    const Gradients<float> full = backward_chunked(inst, tr, inst.cfg.seq_len);
    for (int chunk : {1, 3, 5, 16}) {
      const Gradients<float> chunked = backward_chunked(inst, tr, chunk);
      CHECK(bitwise_equal(full, chunked));
    }
  }
}

TEST_CASE("backward: missing state raises schedule-bug error") {
  Instance inst = make_instance(4, 8, 2, 4, 1);
  Trace tr = run_forward(inst);
  LossAdjoint<float> ladj = make_loss_adjoint(inst.loss, tr.fwd.spike_counts, inst.cfg);
  AdjointState<float> adj = AdjointState<float>::zeros(inst.cfg);
  BackwardWorkspace<float> ws = BackwardWorkspace<float>::make(inst.cfg);
  Gradients<float> grads = Gradients<float>::zeros(inst.cfg);
  BufferStateView<float> view(&tr.states, 2, 4);  // states [2, 6) only
  CHECK_THROWS_AS(backward_chunk(view, 0, 8, inst.task.inputs, tr.spikes, inst.weights, inst.cfg,
                                 ladj, adj, ws, grads),
                  ScheduleBugError);
}

namespace {

double membrane_loss_f64(const Weights<double>& w, const SpikeRecord& input,
                         const NetworkConfig& cfg) {
  LossSpec<double> loss;
  loss.kind = LossKind::MembraneMean;
  NullRecorder<double> sink;
  SpikeRecord spikes(cfg.seq_len, cfg.num_layers, cfg.batch_size, cfg.neurons_per_layer);
  return forward_sequence(w, input, cfg, loss, sink, spikes).loss;
}

}  // namespace

TEST_CASE("backward: spike-free membrane loss matches central finite differences (f64)") {
  Instance seed_inst = make_instance(23, 12, 2, 4, 2, 0.3f);
  NetworkConfig cfg = seed_inst.cfg;
  cfg.threshold = 1.0e6f;  // never fires; dynamics are linear
  const Weights<double> w = cast_weights<double>(seed_inst.weights);
  const SpikeRecord& input = seed_inst.task.inputs;

  LossSpec<double> loss;
  loss.kind = LossKind::MembraneMean;
  SpikeRecord spikes(cfg.seq_len, cfg.num_layers, cfg.batch_size, cfg.neurons_per_layer);
  StoreAllRecorder<double> rec;
  ForwardResult<double> fwd = forward_sequence(w, input, cfg, loss, rec, spikes);
  for (int t = 0; t < cfg.seq_len; ++t)
    for (int l = 0; l < cfg.num_layers; ++l) REQUIRE(spikes.slice(t, l).empty());

  Gradients<double> grads = Gradients<double>::zeros(cfg);
  LossAdjoint<double> ladj = make_loss_adjoint(loss, fwd.spike_counts, cfg);
  AdjointState<double> adj = AdjointState<double>::zeros(cfg);
  BackwardWorkspace<double> ws = BackwardWorkspace<double>::make(cfg);
  seed_adjoint(ladj, adj);
  const auto& states = rec.states();
  BufferStateView<double> view(&states, 0, static_cast<int>(states.size()));
  backward_chunk(view, 0, cfg.seq_len, input, spikes, w, cfg, ladj, adj, ws, grads);

  // Central differences on W_in of layer 0, the only matrix the loss can see
  // without spikes (external events feed layer 0 only).
  const double h = 1e-3;
  int checked = 0;
  for (int p = 0; p < cfg.neurons_per_layer; ++p) {
    for (int n = 0; n < cfg.neurons_per_layer; ++n) {
      Weights<double> wp = w;
      wp.layers[0].w_in.at(p, n) += h;
      const double up = membrane_loss_f64(wp, input, cfg);
      wp.layers[0].w_in.at(p, n) -= 2 * h;
      const double down = membrane_loss_f64(wp, input, cfg);
      const double fd = (up - down) / (2 * h);
      const double an = grads.layers[0].w_in.at(p, n);
      if (std::abs(fd) > 1e-12) {
        CHECK(std::abs(fd - an) / std::abs(fd) < 1e-5);
        ++checked;
      } else {
        CHECK(std::abs(an) < 1e-12);
      }
    }
  }
  CHECK(checked > 0);

  // No spikes anywhere: recurrent and deeper input gradients are exactly zero.
  CHECK(bitwise_equal(grads.layers[0].w_rec, Tensor2<double>(4, 4)));
  CHECK(bitwise_equal(grads.layers[1].w_in, Tensor2<double>(4, 4)));
  CHECK(bitwise_equal(grads.layers[1].w_rec, Tensor2<double>(4, 4)));
}

TEST_CASE("backward: spiking instance produces finite gradients") {
  Instance inst = make_instance(29, 24, 2, 8, 2);
  Trace tr = run_forward(inst);
  CHECK(tr.spikes.total_events() > 0);
  const Gradients<float> grads = backward_chunked(inst, tr, inst.cfg.seq_len);
  CHECK(grads.all_finite());
  CHECK_FALSE(bitwise_equal(grads, Gradients<float>::zeros(inst.cfg)));
}
