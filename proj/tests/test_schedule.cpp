// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "spikecp/errors.hpp"
#include "spikecp/rng.hpp"
#include "spikecp/schedule.hpp"

using namespace spikecp;

namespace {

CheckpointPolicy make(Strategy s, int chunk = 1, int nl = 1, int rc = 1) {
  CheckpointPolicy p;
  p.strategy = s;
  p.chunk_size = chunk;
  p.nb_local = nl;
  p.remote_chunk_size = rc;
  return p;
}

std::vector<int> checkpoint_times(const Schedule& s) {
  std::vector<int> out;
  for (const auto& c : s.checkpoints) out.push_back(c.t);
  return out;
}

void check_coverage(const Schedule& s) {
  // Every t in [0, T) in exactly one chunk, ascending, sources at chunk starts.
  int expect = 0;
  for (const auto& c : s.chunks) {
    CHECK(c.t0 == expect);
    CHECK(c.t1 > c.t0);
    CHECK(c.source_t == c.t0);
    expect = c.t1;
  }
  CHECK(expect == s.seq_len);
}

}  // namespace

TEST_CASE("plan: standard T=9 chunk=3 stores {0,3,6} locally") {
  Schedule s = plan(make(Strategy::Standard, 3), 9);
  CHECK(checkpoint_times(s) == std::vector<int>{0, 3, 6});
  for (const auto& c : s.checkpoints) CHECK(c.tier == Tier::Local);
  CHECK(s.chunks.size() == 3);
  check_coverage(s);
}

TEST_CASE("plan: standard T=10 chunk=4 has a short final chunk") {
  Schedule s = plan(make(Strategy::Standard, 4), 10);
  CHECK(checkpoint_times(s) == std::vector<int>{0, 4, 8});
  CHECK(s.chunks.back().t0 == 8);
  CHECK(s.chunks.back().t1 == 10);
  check_coverage(s);
}

TEST_CASE("plan: double T=4096 rc=256 chunk=16 gives 16 remote ckpts, 16 locals per segment") {
  Schedule s = plan(make(Strategy::Double, 16, 1, 256), 4096);
  CHECK(s.checkpoints.size() == 16);
  for (const auto& c : s.checkpoints) CHECK(c.tier == Tier::Remote);
  REQUIRE(s.segments.size() == 16);
  for (const auto& seg : s.segments) CHECK(seg.chunks.size() == 16);
  check_coverage(s);
}

TEST_CASE("plan: base stores every state") {
  Schedule s = plan(make(Strategy::Base), 7);
  CHECK(s.checkpoints.size() == 7);
  CHECK(s.chunks.size() == 1);
  check_coverage(s);
}

TEST_CASE("plan: hierarchical marks the last nb_local checkpoints local") {
  Schedule s = plan(make(Strategy::Hierarchical, 4, 3), 32);  // nb = 8
  int locals = 0;
  for (const auto& c : s.checkpoints) {
    if (c.tier == Tier::Local) {
      ++locals;
      CHECK(c.t >= s.resident_from);
    }
  }
  CHECK(locals == 3);
  CHECK(s.resident_from == 20);  // (8 - 3) * 4
}

TEST_CASE("plan: rejections name the violated invariant") {
  CHECK_THROWS_AS(plan(make(Strategy::Standard, 0), 8), PlanRejectionError);
  CHECK_THROWS_AS(plan(make(Strategy::Hierarchical, 4, 0), 8), PlanRejectionError);
  CHECK_THROWS_AS(plan(make(Strategy::Hierarchical, 4, 3), 8), PlanRejectionError);  // nb = 2
  CHECK_THROWS_AS(plan(make(Strategy::Double, 3, 1, 8), 16), PlanRejectionError);
  CHECK_THROWS_WITH(plan(make(Strategy::Double, 3, 1, 8), 16),
                    "chunk_size must divide remote_chunk_size");
}

TEST_CASE("plan: coverage holds on random policies") {
  DeterministicRng rng(99);
  for (int k = 0; k < 200; ++k) {
    const int T = 1 + static_cast<int>(rng.next_u32() % 300);
    const int chunk = 1 + static_cast<int>(rng.next_u32() % 40);
    switch (rng.next_u32() % 4) {
      case 0: check_coverage(plan(make(Strategy::Standard, chunk), T)); break;
      case 1: check_coverage(plan(make(Strategy::Remote, chunk), T)); break;
      case 2: {
        CheckpointPolicy p = make(Strategy::Hierarchical, chunk);
        p.nb_local = 1 + static_cast<int>(rng.next_u32() % p.nb_checkpoints(T));
        check_coverage(plan(p, T));
        break;
      }
      default: {
        const int mult = 1 + static_cast<int>(rng.next_u32() % 6);
        check_coverage(plan(make(Strategy::Double, chunk, 1, chunk * mult), T));
        break;
      }
    }
  }
}

TEST_CASE("plan: timestep zero is always a free checkpoint") {
  for (Strategy s : {Strategy::Base, Strategy::Standard, Strategy::Remote,
                     Strategy::Hierarchical, Strategy::Double}) {
    Schedule sched = plan(make(s, 4, 1, 8), 20);
    CHECK(sched.is_checkpoint(0));
  }
}
