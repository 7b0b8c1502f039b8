// SPDX-License-Identifier: Apache-2.0

#include "spikecp/schedule.hpp"

#include <algorithm>

#include "spikecp/errors.hpp"

namespace spikecp {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Base: return "base";
    case Strategy::Standard: return "standard";
    case Strategy::Remote: return "remote";
    case Strategy::Hierarchical: return "hierarchical";
    case Strategy::Double: return "double";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::Base, Strategy::Standard, Strategy::Remote,
                     Strategy::Hierarchical, Strategy::Double})
    if (name == strategy_name(s)) return s;
  throw ConfigError("unknown strategy '" + name + "'");
}

namespace {

std::vector<BackwardChunk> chunk_range(int t0, int t1, int chunk_size) {
  std::vector<BackwardChunk> out;
  for (int t = t0; t < t1; t += chunk_size)
    out.push_back({t, std::min(t + chunk_size, t1), t});
  return out;
}

}  // namespace

Schedule plan(const CheckpointPolicy& policy, int seq_len) {
  policy.validate(seq_len);
  Schedule s;
  s.strategy = policy.strategy;
  s.seq_len = seq_len;
  s.policy = policy;
  s.resident_from = seq_len;

  switch (policy.strategy) {
    case Strategy::Base:
      for (int t = 0; t < seq_len; ++t) s.checkpoints.push_back({t, Tier::Local});
      s.chunks.push_back({0, seq_len, 0});
      break;

    case Strategy::Standard:
    case Strategy::Remote:
    case Strategy::Hierarchical: {
      const Tier tier = policy.strategy == Strategy::Standard ? Tier::Local : Tier::Remote;
      const auto nb = policy.nb_checkpoints(seq_len);
      for (std::int64_t k = 0; k < nb; ++k)
        s.checkpoints.push_back({static_cast<int>(k) * policy.chunk_size, tier});
      s.chunks = chunk_range(0, seq_len, policy.chunk_size);
      if (policy.strategy == Strategy::Hierarchical) {
        // The final nb_local checkpoints never travel to remote memory.
        s.resident_from = static_cast<int>(nb - policy.nb_local) * policy.chunk_size;
        for (auto& c : s.checkpoints)
          if (c.t >= s.resident_from) c.tier = Tier::Local;
      }
      break;
    }

    case Strategy::Double: {
      const auto nbr = policy.nb_remote_checkpoints(seq_len);
      for (std::int64_t k = 0; k < nbr; ++k) {
        const int r0 = static_cast<int>(k) * policy.remote_chunk_size;
        const int r1 = std::min(r0 + policy.remote_chunk_size, seq_len);
        s.checkpoints.push_back({r0, Tier::Remote});
        RemoteSegment seg{r0, r1, chunk_range(r0, r1, policy.chunk_size)};
        for (const auto& c : seg.chunks) s.chunks.push_back(c);
        s.segments.push_back(std::move(seg));
      }
      break;
    }
  }
  return s;
}

}  // namespace spikecp
