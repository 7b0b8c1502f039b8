// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spikecp/config.hpp"
#include "spikecp/engine.hpp"
#include "spikecp/policy.hpp"
#include "spikecp/task.hpp"

namespace spikecp {

// One experiment: network, policy, cost model, synthetic task, run options.
// Parsed from a strict JSON file; unknown keys are rejected.
struct ExperimentConfig {
  NetworkConfig network;
  CheckpointPolicy policy;
  CostModel costs;
  float poisson_rate = 0.15f;
  std::optional<std::vector<float>> target_rates;  // per-step rates; counts = rate * T
  LossKind loss = LossKind::SpikeCountMse;
  int repetitions = 1;
  std::int64_t capacity_slots = 0;
  int threads = 1;
  std::string output_path;

  ExecPolicy exec() const {
    return threads > 1 ? ExecPolicy::openmp(threads) : ExecPolicy::serial();
  }
};

ExperimentConfig parse_experiment_json(const std::string& text);
ExperimentConfig load_experiment_file(const std::string& path);

// Built-in config for `verify` when no file is given.
ExperimentConfig default_verify_config();

// Inputs + targets for a config (targets from config when given, else drawn).
TaskSpec build_task(const ExperimentConfig& cfg);
LossSpec<float> build_loss(const ExperimentConfig& cfg, const TaskSpec& task);

// Stable ledger CSV schema shared by run/sweep/planner outputs.
const std::vector<std::string>& ledger_columns();
std::vector<std::string> ledger_row(const CheckpointPolicy& policy, int seq_len,
                                    const MemoryLedger& ledger);

// Planner output: same schema as ledgers plus a trailing "predicted" flag.
// Fields the predictors cannot know (tile peaks, spike cache) are zero.
struct ParetoPoint;
std::string pareto_csv(const std::vector<ParetoPoint>& points, int seq_len);

struct SweepAxis {
  std::string name;  // T | chunk_size | nb_local | remote_chunk_size | neurons_per_layer
  std::vector<std::int64_t> values;
};
SweepAxis parse_axis(const std::string& spec);  // "name=v1,v2,..."

// Subcommand drivers; return process exit codes (0 ok, 2 config, 3 verify, 4 oom).
int cmd_run(const ExperimentConfig& cfg, const std::string& out_path, bool strict_oom,
            std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, bool inject_fault, std::ostream& report);
int cmd_sweep(const ExperimentConfig& cfg, const std::vector<SweepAxis>& axes,
              const std::string& out_path, std::ostream& log);
int cmd_gen_task(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& log);

}  // namespace spikecp
