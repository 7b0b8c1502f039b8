// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/ledger.hpp"
#include "spikecp/policy.hpp"

namespace spikecp {

struct ParetoPoint {
  CheckpointPolicy policy;
  std::int64_t mem_slots = 0;
  std::int64_t time_micro = 0;
};

// Integer chunk in {floor(sqrt(T)), ceil(sqrt(T))} minimizing the Standard
// memory term chunk + ceil(T / chunk); ties go to the smaller chunk.
int optimal_chunk_standard(int seq_len);

// The sqrt-rule pair for Double: remote_chunk nearest sqrt(T), then the
// divisor of remote_chunk minimizing chunk + remote_chunk/chunk. Ties break
// toward smaller memory, then smaller modeled time, then smaller sizes.
CheckpointPolicy optimal_double_min_memory(int seq_len, std::int64_t m_s = 1,
                                           const CostModel& costs = CostModel{});

// Largest remote_chunk whose predicted Double memory fits the budget (slots,
// including m_others), with chunk set by the sqrt rule over its divisors.
// Throws NoFeasiblePolicyError carrying the minimum achievable memory.
CheckpointPolicy optimal_double_min_time_under_budget(int seq_len, std::int64_t budget_slots,
                                                      std::int64_t m_s, std::int64_t m_others);

// Hyperparameter grid per strategy: powers of two up to T plus exact divisors
// of T (Double chunks range over divisors of each remote_chunk).
std::vector<std::int64_t> planner_grid_values(int seq_len);

// Evaluate predict_memory / predict_time over the grid for the requested
// strategies and keep the non-dominated set, sorted by memory.
std::vector<ParetoPoint> enumerate_pareto(int seq_len, std::int64_t m_s, std::int64_t m_others,
                                          const CostModel& costs,
                                          const std::vector<Strategy>& strategies);

}  // namespace spikecp
