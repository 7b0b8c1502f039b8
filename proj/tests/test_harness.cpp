// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spikecp/csv.hpp"
#include "spikecp/experiment.hpp"
#include "spikecp/rng.hpp"

using namespace spikecp;

namespace {

const char* kValidConfig = R"json({
  "network": {"num_layers": 2, "neurons_per_layer": 16, "batch_size": 4, "seq_len": 32,
              "virtual_tiles": 4, "decay_v": 0.8, "decay_i": 0.5, "threshold": 0.4,
              "surrogate_beta": 2.0, "seed": 7},
  "policy": {"strategy": "double", "chunk_size": 4, "remote_chunk_size": 16},
  "cost": {"lif_step": 0.1, "sync_time": 3.0},
  "task": {"poisson_rate": 0.2},
  "loss": "spike_count_mse",
  "repetitions": 2,
  "capacity_slots": 0,
  "threads": 1,
  "output_path": ""
})json";

}  // namespace

TEST_CASE("config: valid file parses with field values applied") {
  ExperimentConfig cfg = parse_experiment_json(kValidConfig);
  CHECK(cfg.network.num_layers == 2);
  CHECK(cfg.network.seq_len == 32);
  CHECK(cfg.network.decay_i == 0.5f);
  CHECK(cfg.policy.strategy == Strategy::Double);
  CHECK(cfg.policy.remote_chunk_size == 16);
  CHECK(cfg.costs.lif_step == 0.1);
  CHECK(cfg.costs.sync_time == 3.0);
  CHECK(cfg.costs.spike_gen == 1.0);  // untouched default
  CHECK(cfg.poisson_rate == 0.2f);
  CHECK(cfg.repetitions == 2);
}

TEST_CASE("config: unknown keys, missing fields and bad types are rejected") {
  CHECK_THROWS_AS(parse_experiment_json("{"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_json(R"({"policy": {"strategy": "base"}})"), ConfigError);
  CHECK_THROWS_WITH(
      parse_experiment_json(
          R"({"network": {"num_layers": 2, "neurons_per_layer": 4, "batch_size": 1},
              "policy": {"strategy": "base"}})"),
      "missing required field 'network.seq_len'");
  CHECK_THROWS_WITH(
      parse_experiment_json(
          R"({"network": {"num_layers": 2, "neurons_per_layer": 4, "batch_size": 1, "seq_len": 8,
                          "typo_key": 1},
              "policy": {"strategy": "base"}})"),
      "unknown key 'typo_key' in network");
  CHECK_THROWS_AS(
      parse_experiment_json(
          R"({"network": {"num_layers": "two", "neurons_per_layer": 4, "batch_size": 1, "seq_len": 8},
              "policy": {"strategy": "base"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_experiment_json(
          R"({"network": {"num_layers": 2, "neurons_per_layer": 4, "batch_size": 1, "seq_len": 8},
              "policy": {"strategy": "warp"}})"),
      ConfigError);
  // target_rates must match the layer width.
  CHECK_THROWS_AS(
      parse_experiment_json(
          R"({"network": {"num_layers": 2, "neurons_per_layer": 4, "batch_size": 1, "seq_len": 8},
              "policy": {"strategy": "base"}, "task": {"target_rates": [0.1, 0.2]}})"),
      ConfigError);
}

TEST_CASE("csv: ledger schema is frozen") {
  const std::vector<std::string> want = {
      "strategy", "T", "chunk_size", "nb_local", "remote_chunk_size", "peak_local_slots",
      "mean_tile_peak", "max_tile_peak", "n_transfers", "n_syncs", "modeled_time",
      "spike_cache_slots"};
  CHECK(ledger_columns() == want);
}

TEST_CASE("csv: RFC-4180 quoting") {
  CHECK(CsvWriter::quote("plain") == "plain");
  CHECK(CsvWriter::quote("a,b") == "\"a,b\"");
  CHECK(CsvWriter::quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CsvWriter w({"a", "b"});
  w.add_row({"1", "x,y"});
  CHECK(w.serialize() == "a,b\n1,\"x,y\"\n");
}

TEST_CASE("cmd_run: identical repetitions give identical gradient checksums") {
  ExperimentConfig cfg = parse_experiment_json(kValidConfig);
  std::ostringstream out;
  CHECK(cmd_run(cfg, "", false, out) == 0);
  std::istringstream lines(out.str());
  std::string header, row1, row2;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK(header.rfind("strategy,T,chunk_size", 0) == 0);
  CHECK(row1 == row2);
  CHECK(row1.find("false") != std::string::npos);  // no OOM

  std::ostringstream out2;
  CHECK(cmd_run(cfg, "", false, out2) == 0);
  CHECK(out.str() == out2.str());  // end-to-end determinism
}

TEST_CASE("cmd_run: capacity overflow flags the row and strict mode exits 4") {
  ExperimentConfig cfg = parse_experiment_json(kValidConfig);
  cfg.policy = CheckpointPolicy{};  // Base
  cfg.capacity_slots = 100;         // far below any real peak
  std::ostringstream out;
  CHECK(cmd_run(cfg, "", false, out) == 0);
  CHECK(out.str().find("true") != std::string::npos);
  std::ostringstream out2;
  CHECK(cmd_run(cfg, "", true, out2) == 4);
}

TEST_CASE("cmd_verify: default battery passes, fault injection is detected") {
  ExperimentConfig cfg = default_verify_config();
  std::ostringstream report;
  CHECK(cmd_verify(cfg, false, report) == 0);
  CHECK(report.str().find("[FAIL]") == std::string::npos);
  CHECK(report.str().find("all assertions passed") != std::string::npos);

  std::ostringstream report2;
  CHECK(cmd_verify(cfg, true, report2) == 0);
  CHECK(report2.str().find("negative control") != std::string::npos);
  CHECK(report2.str().find("[FAIL]") == std::string::npos);
}

TEST_CASE("cmd_verify: rejects large instances") {
  ExperimentConfig cfg = default_verify_config();
  cfg.network.seq_len = 513;
  std::ostringstream report;
  CHECK_THROWS_AS(cmd_verify(cfg, false, report), ConfigError);
}

TEST_CASE("cmd_sweep: measured equals predicted, byte-identical rerun, flagged failures") {
  ExperimentConfig cfg = default_verify_config();
  cfg.policy.strategy = Strategy::Standard;
  SweepAxis axis = parse_axis("chunk_size=0,2,4,8,64");  // 0 is invalid, 64 > nb is fine
  std::ostringstream a, b;
  CHECK(cmd_sweep(cfg, {axis}, "", a) == 0);
  CHECK(cmd_sweep(cfg, {axis}, "", b) == 0);
  CHECK(a.str() == b.str());

  std::istringstream lines(a.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("predicted_peak_local_slots") != std::string::npos);
  int rows = 0, flagged = 0, exact = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    if (line.find("chunk_size must be >= 1") != std::string::npos) {
      ++flagged;
      continue;
    }
    // peak_local_slots (col 6) must equal predicted_peak_local_slots (col 13)
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string item; std::getline(ss, item, ',');) f.push_back(item);
    REQUIRE(f.size() >= 16);
    if (f[5] == f[12]) ++exact;
  }
  CHECK(rows == 5);
  CHECK(flagged == 1);
  CHECK(exact == 4);
}

TEST_CASE("parse_axis: validation") {
  CHECK_THROWS_AS(parse_axis("chunk_size"), ConfigError);
  CHECK_THROWS_AS(parse_axis("bogus=1,2"), ConfigError);
  CHECK_THROWS_AS(parse_axis("T=a,b"), ConfigError);
  SweepAxis ax = parse_axis("T=16,32,64");
  CHECK(ax.values == std::vector<std::int64_t>{16, 32, 64});
}

TEST_CASE("gen_task: edge rates, empirical rate, determinism") {
  NetworkConfig cfg;
  cfg.num_layers = 2;
  cfg.neurons_per_layer = 16;
  cfg.batch_size = 8;
  cfg.seq_len = 100;

  SUBCASE("rate 0 is empty, rate 1 fires everywhere") {
    CHECK(gen_task(1, cfg, 0.0f).inputs.total_events() == 0);
    CHECK(gen_task(1, cfg, 1.0f).inputs.total_events() == 100ll * 8 * 16);
  }

  SUBCASE("empirical rate within 3 sigma of nominal") {
    const float rate = 0.2f;
    const double n = 100.0 * 8 * 16;  // 12800 >= 1e4 samples
    TaskSpec task = gen_task(2, cfg, rate);
    const double got = static_cast<double>(task.inputs.total_events());
    const double sigma = std::sqrt(n * rate * (1 - rate));
    CHECK(std::abs(got - n * rate) < 3 * sigma);
  }

  SUBCASE("same seed same task, different seed different events") {
    TaskSpec a = gen_task(3, cfg, 0.2f);
    TaskSpec b = gen_task(3, cfg, 0.2f);
    TaskSpec c = gen_task(4, cfg, 0.2f);
    CHECK(a.inputs.content_hash() == b.inputs.content_hash());
    CHECK(a.target_counts == b.target_counts);
    CHECK(a.inputs.content_hash() != c.inputs.content_hash());
  }

  SUBCASE("targets live in the configured band") {
    TaskSpec task = gen_task(5, cfg, 0.2f);
    for (float t : task.target_counts) {
      CHECK(t >= 0.05f * 100);
      CHECK(t <= 0.25f * 100);
    }
  }
}

TEST_CASE("pareto_csv: ledger schema plus the predicted flag") {
  const auto pts = enumerate_pareto(64, 4, 2, CostModel{}, {Strategy::Base, Strategy::Standard});
  const std::string csv = pareto_csv(pts, 64);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "strategy,T,chunk_size,nb_local,remote_chunk_size,peak_local_slots,"
                  "mean_tile_peak,max_tile_peak,n_transfers,n_syncs,modeled_time,"
                  "spike_cache_slots,predicted");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    CHECK(line.substr(line.size() - 4) == "true");
  }
  CHECK(rows == static_cast<int>(pts.size()));
}

TEST_CASE("cmd_gen_task: emits the event lists as JSON") {
  ExperimentConfig cfg = default_verify_config();
  cfg.network.seq_len = 4;
  std::ostringstream out;
  CHECK(cmd_gen_task(cfg, "", out) == 0);
  CHECK(out.str().find("\"events\"") != std::string::npos);
  CHECK(out.str().find("\"target_counts\"") != std::string::npos);
}
