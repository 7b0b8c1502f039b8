// SPDX-License-Identifier: Apache-2.0
//
// spikecp — experiment runner for checkpointed training of sparse recurrent
// networks over a simulated two-tier memory hierarchy.
//
//   spikecp run      --config cfg.json [--out rows.csv] [--seed N]
//                    [--capacity-slots N] [--strict-oom]
//   spikecp verify   [--config cfg.json] [--inject-fault] [--seed N]
//   spikecp sweep    --config cfg.json --axis chunk_size=1,2,4 [--axis T=...]
//                    [--out rows.csv]
//   spikecp gen-task --config cfg.json [--out task.json]
//
// Exit codes: 0 success, 2 config error, 3 verification failure,
// 4 simulated OOM (run with --strict-oom).

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikecp/experiment.hpp"

using namespace spikecp;

int main(int argc, char** argv) {
  CLI::App app{"checkpointed training for sparse recurrent networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::vector<std::string> axis_specs;
  std::int64_t seed_override = -1;
  std::int64_t capacity_override = -1;
  bool strict_oom = false;
  bool inject_fault = false;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (config_required) opt->required();
    sub->add_option("--out", out_path, "output file path");
    sub->add_option("--seed", seed_override, "override network.seed");
    sub->add_option("--capacity-slots", capacity_override, "override capacity_slots");
  };

  CLI::App* run = app.add_subcommand("run", "execute training steps, emit ledger CSV");
  add_common(run, true);
  run->add_flag("--strict-oom", strict_oom, "exit 4 when a simulated OOM occurs");

  CLI::App* verify = app.add_subcommand("verify", "oracle battery: gradients, formulas, counters");
  add_common(verify, false);
  verify->add_flag("--inject-fault", inject_fault,
                   "negative control: drop one cached spike and expect detection");

  CLI::App* sweep = app.add_subcommand("sweep", "cross-product sweep, measured vs predicted CSV");
  add_common(sweep, true);
  sweep->add_option("--axis", axis_specs, "axis spec name=v1,v2,... (repeatable)")->required();

  CLI::App* gen = app.add_subcommand("gen-task", "emit the synthetic task as JSON");
  add_common(gen, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    ExperimentConfig cfg =
        config_path.empty() ? default_verify_config() : load_experiment_file(config_path);
    if (seed_override >= 0) cfg.network.seed = static_cast<std::uint64_t>(seed_override);
    if (capacity_override >= 0) cfg.capacity_slots = capacity_override;
    const std::string out = out_path.empty() ? cfg.output_path : out_path;

    if (*run) return cmd_run(cfg, out, strict_oom, std::cout);
    if (*verify) return cmd_verify(cfg, inject_fault, std::cout);
    if (*sweep) {
      std::vector<SweepAxis> axes;
      for (const auto& spec : axis_specs) axes.push_back(parse_axis(spec));
      return cmd_sweep(cfg, axes, out, std::cout);
    }
    if (*gen) return cmd_gen_task(cfg, out, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const PlanRejectionError& e) {
    std::cerr << "plan rejected: " << e.what() << "\n";
    return 2;
  } catch (const OomError& e) {
    std::cerr << "simulated OOM: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
