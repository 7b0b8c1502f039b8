// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "spikecp/engine.hpp"
#include "spikecp/predict.hpp"
#include "test_util.hpp"

using namespace spikecp;
using namespace spikecp::testutil;

namespace {

CheckpointPolicy make(Strategy s, int chunk = 1, int nl = 1, int rc = 1) {
  CheckpointPolicy p;
  p.strategy = s;
  p.chunk_size = chunk;
  p.nb_local = nl;
  p.remote_chunk_size = rc;
  return p;
}

TrainingStepResult run(const Instance& inst, const CheckpointPolicy& p,
                       const EngineOptions& opts = {}) {
  return run_training_step(inst.weights, inst.task.inputs, inst.cfg, inst.loss, p, CostModel{},
                           opts);
}

std::vector<CheckpointPolicy> battery_for(int T) {
  const int chunk = std::max(2, static_cast<int>(std::int64_t(std::sqrt(double(T)))));
  const std::int64_t nb = ceil_div(T, chunk);
  std::vector<CheckpointPolicy> out;
  out.push_back(make(Strategy::Standard, chunk));
  out.push_back(make(Strategy::Remote, chunk));
  out.push_back(make(Strategy::Hierarchical, chunk, static_cast<int>(std::min<std::int64_t>(3, nb))));
  const int dchunk = std::max(1, chunk / 2);
  out.push_back(make(Strategy::Double, dchunk, 1, dchunk * 4));
  return out;
}

}  // namespace

TEST_CASE("engine: every policy reproduces base gradients bitwise (seed 3 instance)") {
  Instance inst = make_instance(3, 32, 2, 8, 4);
  const TrainingStepResult base = run(inst, make(Strategy::Base));
  CHECK(inst.task.inputs.total_events() > 0);
  CHECK(base.spike_events > 0);

  for (const auto& policy : battery_for(32)) {
    const TrainingStepResult got = run(inst, policy);
    CHECK(bitwise_equal(got.grads, base.grads));
    CHECK(std::memcmp(&got.loss, &base.loss, sizeof(float)) == 0);
    CHECK(got.spike_hash_post_forward == base.spike_hash_post_forward);
  }
}

TEST_CASE("engine: gradient invariance on ragged and odd sequence lengths") {
  for (int T : {17, 23, 65}) {
    Instance inst = make_instance(100 + T, T, 2, 8, 2);
    const TrainingStepResult base = run(inst, make(Strategy::Base));
    for (const auto& policy : battery_for(T)) {
      const TrainingStepResult got = run(inst, policy);
      CHECK(bitwise_equal(got.grads, base.grads));
    }
  }
}

TEST_CASE("engine: measured peaks and counters match the analytic predictors exactly") {
  Instance inst = make_instance(11, 48, 2, 8, 2, 0.15f, 0.25f, 2);
  const std::int64_t m_s = inst.cfg.state_slots();
  const TrainingStepResult base = run(inst, make(Strategy::Base));
  const std::int64_t m_others = base.ledger.peak_local_slots() - m_s * 48;
  CHECK(m_others > 0);

  std::vector<CheckpointPolicy> policies = battery_for(48);
  policies.push_back(make(Strategy::Standard, 5));            // ragged: 48 = 5*9+3
  policies.push_back(make(Strategy::Remote, 7));              // ragged
  policies.push_back(make(Strategy::Hierarchical, 6, 8));     // nb = 8 = nb_local -> N_c = 0
  policies.push_back(make(Strategy::Double, 5, 1, 20));       // ragged segments
  for (const auto& policy : policies) {
    const TrainingStepResult got = run(inst, policy);
    const PolicyFootprint f = policy_footprint(policy, 48);
    CHECK(got.ledger.peak_local_slots() == predict_memory_slots(policy, 48, m_s, m_others));
    CHECK(got.ledger.n_syncs() == f.n_syncs);
    CHECK(got.ledger.n_transfers() == f.n_transfers);
    CHECK(got.ledger.modeled_time_micro() == predict_time_micro(policy, 48, m_s, CostModel{}));
    CHECK(got.ledger.ops.lif_steps == 48 + f.replay_steps + f.extra_replay_steps);
    CHECK(got.ledger.ops.spike_gen_calls == 48);
    CHECK(got.ledger.ops.encode_calls == 48);
  }
}

TEST_CASE("engine: spike cache is byte-identical after the backward pass") {
  Instance inst = make_instance(31, 40, 3, 8, 2);
  for (const auto& policy : battery_for(40)) {
    const TrainingStepResult got = run(inst, policy);
    CHECK(got.spike_hash_post_forward == got.spike_hash_post_backward);
  }
}

TEST_CASE("engine: determinism across repeated runs") {
  Instance inst = make_instance(12, 33, 2, 8, 2);
  const CheckpointPolicy p = make(Strategy::Double, 3, 1, 12);
  const TrainingStepResult a = run(inst, p);
  const TrainingStepResult b = run(inst, p);
  CHECK(bitwise_equal(a.grads, b.grads));
  CHECK(gradient_checksum(a.grads) == gradient_checksum(b.grads));
  CHECK(std::memcmp(&a.loss, &b.loss, sizeof(float)) == 0);
}

TEST_CASE("recompute_chunk: zero-length range, spike-free counters, bitwise trace replay") {
  Instance inst = make_instance(41, 24, 2, 8, 2);
  SpikeRecord spikes(24, 2, 2, 8);
  StoreAllRecorder<float> rec;
  ForwardResult<float> fwd =
      forward_sequence(inst.weights, inst.task.inputs, inst.cfg, inst.loss, rec, spikes);

  SUBCASE("empty range gives empty output") {
    std::vector<NetworkState<float>> out;
    OpCounters ops;
    recompute_chunk(rec.states()[0], 5, 5, inst.task.inputs, spikes, inst.weights, inst.cfg, 1,
                    out, {}, &ops);
    CHECK(out.empty());
    CHECK(ops.lif_steps == 0);
  }

  SUBCASE("replay of [0, T) equals the store-all trace bitwise, zero spike work") {
    std::vector<NetworkState<float>> out;
    OpCounters ops;
    recompute_chunk(rec.states()[0], 0, 24, inst.task.inputs, spikes, inst.weights, inst.cfg, 1,
                    out, {}, &ops);
    REQUIRE(out.size() == 24);
    for (int t = 0; t < 24; ++t) CHECK(bitwise_equal(out[t], rec.states()[t]));
    CHECK(ops.spike_gen_calls == 0);
    CHECK(ops.encode_calls == 0);
    CHECK(ops.lif_steps == 23);
  }

  SUBCASE("strided replay keeps exactly the checkpoint positions") {
    std::vector<NetworkState<float>> out;
    OpCounters ops;
    recompute_chunk(rec.states()[4], 4, 24, inst.task.inputs, spikes, inst.weights, inst.cfg, 5,
                    out, {}, &ops);
    REQUIRE(out.size() == 4);  // t = 4, 9, 14, 19
    for (int k = 0; k < 4; ++k) CHECK(bitwise_equal(out[k], rec.states()[4 + 5 * k]));
    CHECK(ops.lif_steps == 15);  // replays up to the last kept position only
    CHECK(ops.spike_gen_calls == 0);
  }

  SUBCASE("modeled recompute cost per step is below the forward step cost") {
    const CostModel c;
    CHECK(c.lif_micro() < c.fwd_step_micro());
  }
}

TEST_CASE("engine: dropped cached spike is reported as a determinism violation") {
  Instance inst = make_instance(3, 32, 2, 8, 4);
  EngineOptions opts;
  opts.cross_check = true;
  opts.inject_drop_spike = true;
  CHECK_THROWS_AS(run(inst, make(Strategy::Standard, 4), opts), DeterminismViolationError);

  // Without fault injection the cross-check passes everywhere.
  EngineOptions clean;
  clean.cross_check = true;
  for (const auto& policy : battery_for(32)) CHECK_NOTHROW(run(inst, policy, clean));
}

TEST_CASE("engine: capacity limit raises simulated OOM for base but not standard") {
  Instance inst = make_instance(8, 64, 2, 8, 2);
  const std::int64_t m_s = inst.cfg.state_slots();
  const TrainingStepResult base = run(inst, make(Strategy::Base));
  const std::int64_t m_others = base.ledger.peak_local_slots() - m_s * 64;

  EngineOptions opts;
  opts.capacity_slots = 32 * m_s + m_others;  // room for half the sequence
  CHECK_THROWS_AS(run(inst, make(Strategy::Base), opts), OomError);
  CHECK_NOTHROW(run(inst, make(Strategy::Standard, 8), opts));
}

TEST_CASE("engine: remote local peak is flat in T at fixed chunk") {
  const int chunk = 8;
  std::int64_t peak64 = 0, peak256 = 0;
  {
    Instance inst = make_instance(50, 64, 2, 8, 2);
    const TrainingStepResult base = run(inst, make(Strategy::Base));
    const std::int64_t mo = base.ledger.peak_local_slots() - inst.cfg.state_slots() * 64;
    peak64 = run(inst, make(Strategy::Remote, chunk)).ledger.peak_local_slots() - mo;
  }
  {
    Instance inst = make_instance(50, 256, 2, 8, 2);
    const TrainingStepResult base = run(inst, make(Strategy::Base));
    const std::int64_t mo = base.ledger.peak_local_slots() - inst.cfg.state_slots() * 256;
    peak256 = run(inst, make(Strategy::Remote, chunk)).ledger.peak_local_slots() - mo;
  }
  CHECK(peak64 == peak256);  // Eq. 6 has no nb_checkpoints term
}

TEST_CASE("engine: input validation") {
  Instance inst = make_instance(2, 16, 2, 8, 2);
  SpikeRecord wrong(8, 1, 2, 8);
  CHECK_THROWS_AS(run_training_step(inst.weights, wrong, inst.cfg, inst.loss,
                                    make(Strategy::Base), CostModel{}),
                  ConfigError);
  LossSpec<float> bad;
  bad.kind = LossKind::SpikeCountMse;
  CHECK_THROWS_AS(run_training_step(inst.weights, inst.task.inputs, inst.cfg, bad,
                                    make(Strategy::Base), CostModel{}),
                  ConfigError);
}
