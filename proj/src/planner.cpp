// SPDX-License-Identifier: Apache-2.0

#include "spikecp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <tuple>

#include "spikecp/predict.hpp"

namespace spikecp {

namespace {

std::vector<std::int64_t> divisors_of(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    out.push_back(d);
    if (d != n / d) out.push_back(n / d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Divisors of the remote chunk minimizing Eq. 11's memory term; usually the
// pair straddling sqrt(remote_chunk). Callers break remaining ties by time.
std::vector<std::int64_t> best_double_chunks(std::int64_t remote_chunk) {
  std::int64_t best_term = 1 + remote_chunk;
  for (std::int64_t c : divisors_of(remote_chunk))
    best_term = std::min(best_term, c + remote_chunk / c);
  std::vector<std::int64_t> out;
  for (std::int64_t c : divisors_of(remote_chunk))
    if (c + remote_chunk / c == best_term) out.push_back(c);
  return out;
}

std::int64_t best_double_chunk(std::int64_t remote_chunk) {
  return best_double_chunks(remote_chunk).front();
}

}  // namespace

int optimal_chunk_standard(int seq_len) {
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(seq_len)));
  std::int64_t best = 0;
  std::int64_t best_term = 0;
  for (std::int64_t c : {root, root + 1}) {
    if (c < 1 || c > seq_len) continue;
    const std::int64_t term = c + ceil_div(seq_len, c);
    if (best == 0 || term < best_term) {
      best = c;
      best_term = term;
    }
  }
  return static_cast<int>(best);
}

CheckpointPolicy optimal_double_min_memory(int seq_len, std::int64_t m_s,
                                           const CostModel& costs) {
  const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(seq_len)));
  CheckpointPolicy best;
  std::tuple<std::int64_t, std::int64_t, int, int> best_key{0, 0, 0, 0};
  bool have = false;
  for (std::int64_t rc : {root, root + 1}) {
    if (rc < 1) continue;
    for (std::int64_t c : best_double_chunks(rc)) {
      CheckpointPolicy p;
      p.strategy = Strategy::Double;
      p.remote_chunk_size = static_cast<int>(rc);
      p.chunk_size = static_cast<int>(c);
      const std::int64_t mem = predict_memory_slots(p, seq_len, m_s, 0);
      const std::int64_t time = predict_time_micro(p, seq_len, m_s, costs);
      const std::tuple<std::int64_t, std::int64_t, int, int> key{mem, time, p.remote_chunk_size,
                                                                 p.chunk_size};
      if (!have || key < best_key) {
        best = p;
        best_key = key;
        have = true;
      }
    }
  }
  return best;
}

CheckpointPolicy optimal_double_min_time_under_budget(int seq_len, std::int64_t budget_slots,
                                                      std::int64_t m_s, std::int64_t m_others) {
  CheckpointPolicy best;
  bool feasible = false;
  std::int64_t min_achievable = 0;
  bool have_min = false;
  for (std::int64_t rc : planner_grid_values(seq_len)) {
    CheckpointPolicy p;
    p.strategy = Strategy::Double;
    p.remote_chunk_size = static_cast<int>(rc);
    p.chunk_size = static_cast<int>(best_double_chunk(rc));
    const std::int64_t mem = predict_memory_slots(p, seq_len, m_s, m_others);
    if (!have_min || mem < min_achievable) {
      min_achievable = mem;
      have_min = true;
    }
    // Larger remote chunks mean fewer communications, so the largest feasible
    // remote chunk is the fastest one.
    if (mem <= budget_slots &&
        (!feasible || p.remote_chunk_size > best.remote_chunk_size))
      best = p, feasible = true;
  }
  if (!feasible)
    throw NoFeasiblePolicyError("no double-checkpoint configuration fits " +
                                    std::to_string(budget_slots) + " slots; minimum achievable is " +
                                    std::to_string(min_achievable),
                                min_achievable);
  return best;
}

std::vector<std::int64_t> planner_grid_values(int seq_len) {
  std::set<std::int64_t> vals;
  for (std::int64_t p = 1; p <= seq_len; p *= 2) vals.insert(p);
  for (std::int64_t d : divisors_of(seq_len)) vals.insert(d);
  return {vals.begin(), vals.end()};
}

std::vector<ParetoPoint> enumerate_pareto(int seq_len, std::int64_t m_s, std::int64_t m_others,
                                          const CostModel& costs,
                                          const std::vector<Strategy>& strategies) {
  if (seq_len < 1) throw ConfigError("enumerate_pareto: seq_len must be >= 1");
  if (strategies.empty()) throw ConfigError("enumerate_pareto: empty strategy set");
  const std::vector<std::int64_t> grid = planner_grid_values(seq_len);

  std::vector<ParetoPoint> points;
  auto consider = [&](const CheckpointPolicy& p) {
    points.push_back({p, predict_memory_slots(p, seq_len, m_s, m_others),
                      predict_time_micro(p, seq_len, m_s, costs)});
  };

  for (Strategy s : strategies) {
    CheckpointPolicy p;
    p.strategy = s;
    switch (s) {
      case Strategy::Base:
        consider(p);
        break;
      case Strategy::Standard:
      case Strategy::Remote:
        for (std::int64_t c : grid) {
          p.chunk_size = static_cast<int>(c);
          consider(p);
        }
        break;
      case Strategy::Hierarchical:
        for (std::int64_t c : grid) {
          p.chunk_size = static_cast<int>(c);
          const std::int64_t nb = p.nb_checkpoints(seq_len);
          for (std::int64_t nl = 1; nl <= nb; nl *= 2) {
            p.nb_local = static_cast<int>(nl);
            consider(p);
          }
        }
        break;
      case Strategy::Double:
        for (std::int64_t rc : grid) {
          p.remote_chunk_size = static_cast<int>(rc);
          for (std::int64_t c : divisors_of(rc)) {
            p.chunk_size = static_cast<int>(c);
            consider(p);
          }
        }
        break;
    }
  }

  // Keep the non-dominated set.
  std::vector<ParetoPoint> frontier;
  for (const auto& a : points) {
    bool dominated = false;
    for (const auto& b : points) {
      if (b.mem_slots <= a.mem_slots && b.time_micro <= a.time_micro &&
          (b.mem_slots < a.mem_slots || b.time_micro < a.time_micro)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) frontier.push_back(a);
  }
  auto key = [](const ParetoPoint& p) {
    return std::tuple<std::int64_t, std::int64_t, int, int, int, int>(
        p.mem_slots, p.time_micro, static_cast<int>(p.policy.strategy), p.policy.chunk_size,
        p.policy.nb_local, p.policy.remote_chunk_size);
  };
  std::sort(frontier.begin(), frontier.end(),
            [&](const ParetoPoint& a, const ParetoPoint& b) { return key(a) < key(b); });
  frontier.erase(std::unique(frontier.begin(), frontier.end(),
                             [&](const ParetoPoint& a, const ParetoPoint& b) {
                               return key(a) == key(b);
                             }),
                 frontier.end());
  return frontier;
}

}  // namespace spikecp
