// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spikecp {

// Invalid experiment or network configuration; rejected before any compute.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint policy cannot be scheduled for the given sequence length.
// Message names the violated invariant.
struct PlanRejectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A backward chunk asked for a state the schedule never materialized.
// Always a bug in the schedule executor, never recovered from.
struct ScheduleBugError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A recomputed state diverged bitwise from a stored checkpoint.
struct DeterminismViolationError : std::runtime_error {
  int timestep;
  DeterminismViolationError(const std::string& what, int t)
      : std::runtime_error(what), timestep(t) {}
};

// A kernel produced a non-finite value.
struct NumericOverflowError : std::runtime_error {
  int layer;
  int timestep;
  NumericOverflowError(const std::string& what, int l, int t)
      : std::runtime_error(what), layer(l), timestep(t) {}
};

// Simulated local memory exhausted (only when a capacity limit is set).
struct OomError : std::runtime_error {
  std::int64_t attempted_slots;
  std::int64_t capacity_slots;
  int timestep;
  OomError(const std::string& what, std::int64_t attempted, std::int64_t cap, int t)
      : std::runtime_error(what), attempted_slots(attempted), capacity_slots(cap), timestep(t) {}
};

// Ledger balance went negative or a free did not match an allocation.
struct LedgerCorruptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Planner could not satisfy a memory budget; carries the best achievable value.
struct NoFeasiblePolicyError : std::runtime_error {
  std::int64_t min_achievable_slots;
  NoFeasiblePolicyError(const std::string& what, std::int64_t min_slots)
      : std::runtime_error(what), min_achievable_slots(min_slots) {}
};

}  // namespace spikecp
