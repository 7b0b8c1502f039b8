// SPDX-License-Identifier: Apache-2.0

#include "spikecp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "spikecp/csv.hpp"
#include "spikecp/planner.hpp"
#include "spikecp/predict.hpp"

namespace spikecp {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

const json& require(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing required field '" + where + "." + key + "'");
  return *it;
}

template <typename T>
T as(const json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + path + "' has the wrong type");
  }
}

template <typename T>
T opt(const json& obj, const std::string& where, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return as<T>(*it, where + "." + key);
}

std::string field_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  out << text;
}

}  // namespace

ExperimentConfig parse_experiment_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root, "config",
             {"network", "policy", "cost", "task", "loss", "repetitions", "capacity_slots",
              "threads", "output_path"});

  ExperimentConfig cfg;

  const json& net = require(root, "config", "network");
  check_keys(net, "network",
             {"num_layers", "neurons_per_layer", "batch_size", "seq_len", "virtual_tiles",
              "decay_v", "decay_i", "threshold", "surrogate_beta", "seed"});
  cfg.network.num_layers = as<int>(require(net, "network", "num_layers"), "network.num_layers");
  cfg.network.neurons_per_layer =
      as<int>(require(net, "network", "neurons_per_layer"), "network.neurons_per_layer");
  cfg.network.batch_size = as<int>(require(net, "network", "batch_size"), "network.batch_size");
  cfg.network.seq_len = as<int>(require(net, "network", "seq_len"), "network.seq_len");
  cfg.network.virtual_tiles = opt(net, "network", "virtual_tiles", 1);
  cfg.network.decay_v = opt(net, "network", "decay_v", 0.9f);
  cfg.network.decay_i = opt(net, "network", "decay_i", 0.8f);
  cfg.network.threshold = opt(net, "network", "threshold", 0.25f);
  cfg.network.surrogate_beta = opt(net, "network", "surrogate_beta", 1.0f);
  cfg.network.seed = opt<std::uint64_t>(net, "network", "seed", 0);
  cfg.network.validate();

  const json& pol = require(root, "config", "policy");
  check_keys(pol, "policy", {"strategy", "chunk_size", "nb_local", "remote_chunk_size"});
  cfg.policy.strategy =
      strategy_from_name(as<std::string>(require(pol, "policy", "strategy"), "policy.strategy"));
  cfg.policy.chunk_size = opt(pol, "policy", "chunk_size", 1);
  cfg.policy.nb_local = opt(pol, "policy", "nb_local", 1);
  cfg.policy.remote_chunk_size = opt(pol, "policy", "remote_chunk_size", cfg.policy.chunk_size);
  cfg.policy.validate(cfg.network.seq_len);

  if (root.contains("cost")) {
    const json& cost = root["cost"];
    check_keys(cost, "cost",
               {"lif_step", "spike_gen", "encode", "bwd_step", "bandwidth", "sync_time"});
    cfg.costs.lif_step = opt(cost, "cost", "lif_step", cfg.costs.lif_step);
    cfg.costs.spike_gen = opt(cost, "cost", "spike_gen", cfg.costs.spike_gen);
    cfg.costs.encode = opt(cost, "cost", "encode", cfg.costs.encode);
    cfg.costs.bwd_step = opt(cost, "cost", "bwd_step", cfg.costs.bwd_step);
    cfg.costs.bandwidth_slots_per_unit =
        opt(cost, "cost", "bandwidth", cfg.costs.bandwidth_slots_per_unit);
    cfg.costs.sync_time = opt(cost, "cost", "sync_time", cfg.costs.sync_time);
    cfg.costs.validate();
  }

  if (root.contains("task")) {
    const json& task = root["task"];
    check_keys(task, "task", {"poisson_rate", "target_rates"});
    cfg.poisson_rate = opt(task, "task", "poisson_rate", cfg.poisson_rate);
    if (task.contains("target_rates")) {
      cfg.target_rates = as<std::vector<float>>(task["target_rates"], "task.target_rates");
      if (static_cast<int>(cfg.target_rates->size()) != cfg.network.neurons_per_layer)
        throw ConfigError("task.target_rates length must equal neurons_per_layer");
    }
  }
  if (!(cfg.poisson_rate > 0.0f && cfg.poisson_rate < 1.0f))
    throw ConfigError("task.poisson_rate must be in (0,1)");

  if (root.contains("loss")) {
    const std::string name = as<std::string>(root["loss"], "loss");
    if (name == "spike_count_mse")
      cfg.loss = LossKind::SpikeCountMse;
    else if (name == "membrane_mean")
      cfg.loss = LossKind::MembraneMean;
    else
      throw ConfigError("loss must be 'spike_count_mse' or 'membrane_mean'");
  }

  cfg.repetitions = opt(root, "config", "repetitions", 1);
  if (cfg.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  cfg.capacity_slots = opt<std::int64_t>(root, "config", "capacity_slots", 0);
  if (cfg.capacity_slots < 0) throw ConfigError("capacity_slots must be >= 0");
  cfg.threads = opt(root, "config", "threads", 1);
  if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
  cfg.output_path = opt<std::string>(root, "config", "output_path", "");
  return cfg;
}

ExperimentConfig load_experiment_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_json(buf.str());
}

ExperimentConfig default_verify_config() {
  ExperimentConfig cfg;
  cfg.network.num_layers = 2;
  cfg.network.neurons_per_layer = 16;
  cfg.network.batch_size = 4;
  cfg.network.seq_len = 64;
  cfg.network.virtual_tiles = 4;
  cfg.network.seed = 42;
  cfg.policy.strategy = Strategy::Standard;
  cfg.policy.chunk_size = 8;
  return cfg;
}

TaskSpec build_task(const ExperimentConfig& cfg) {
  TaskSpec task = gen_task(cfg.network.seed, cfg.network, cfg.poisson_rate);
  if (cfg.target_rates) {
    for (int n = 0; n < cfg.network.neurons_per_layer; ++n)
      task.target_counts[n] = (*cfg.target_rates)[n] * static_cast<float>(cfg.network.seq_len);
  }
  return task;
}

LossSpec<float> build_loss(const ExperimentConfig& cfg, const TaskSpec& task) {
  LossSpec<float> loss;
  loss.kind = cfg.loss;
  loss.target_counts = task.target_counts;
  return loss;
}

const std::vector<std::string>& ledger_columns() {
  static const std::vector<std::string> cols = {
      "strategy",    "T",           "chunk_size", "nb_local", "remote_chunk_size",
      "peak_local_slots", "mean_tile_peak", "max_tile_peak", "n_transfers", "n_syncs",
      "modeled_time", "spike_cache_slots"};
  return cols;
}

namespace {

// Hyperparameters not used by a strategy print as zero.
std::tuple<int, int, int> policy_fields(const CheckpointPolicy& p) {
  switch (p.strategy) {
    case Strategy::Base: return {0, 0, 0};
    case Strategy::Standard:
    case Strategy::Remote: return {p.chunk_size, 0, 0};
    case Strategy::Hierarchical: return {p.chunk_size, p.nb_local, 0};
    case Strategy::Double: return {p.chunk_size, 0, p.remote_chunk_size};
  }
  return {0, 0, 0};
}

}  // namespace

std::vector<std::string> ledger_row(const CheckpointPolicy& policy, int seq_len,
                                    const MemoryLedger& ledger) {
  const auto [chunk, nl, rc] = policy_fields(policy);
  return {CsvWriter::field(std::string(strategy_name(policy.strategy))),
          CsvWriter::field(seq_len),
          CsvWriter::field(chunk),
          CsvWriter::field(nl),
          CsvWriter::field(rc),
          CsvWriter::field(ledger.peak_local_slots()),
          CsvWriter::field(ledger.mean_tile_peak()),
          CsvWriter::field(ledger.max_tile_peak()),
          CsvWriter::field(ledger.n_transfers()),
          CsvWriter::field(ledger.n_syncs()),
          CsvWriter::field(ledger.modeled_time()),
          CsvWriter::field(ledger.spike_cache_slots())};
}

std::string pareto_csv(const std::vector<ParetoPoint>& points, int seq_len) {
  std::vector<std::string> cols = ledger_columns();
  cols.push_back("predicted");
  CsvWriter csv(cols);
  for (const ParetoPoint& p : points) {
    const auto [chunk, nl, rc] = policy_fields(p.policy);
    const PolicyFootprint f = policy_footprint(p.policy, seq_len);
    csv.add_row({strategy_name(p.policy.strategy), CsvWriter::field(seq_len),
                 CsvWriter::field(chunk), CsvWriter::field(nl), CsvWriter::field(rc),
                 CsvWriter::field(p.mem_slots), CsvWriter::field(0.0),
                 CsvWriter::field(std::int64_t(0)), CsvWriter::field(f.n_transfers),
                 CsvWriter::field(f.n_syncs),
                 CsvWriter::field(static_cast<double>(p.time_micro) / 1e6),
                 CsvWriter::field(std::int64_t(0)), "true"});
  }
  return csv.serialize();
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("axis must be name=v1,v2,... got '" + spec + "'");
  SweepAxis axis;
  axis.name = spec.substr(0, eq);
  static const std::set<std::string> allowed = {"T", "chunk_size", "nb_local",
                                                "remote_chunk_size", "neurons_per_layer"};
  if (allowed.find(axis.name) == allowed.end())
    throw ConfigError("unknown sweep axis '" + axis.name + "'");
  std::string rest = spec.substr(eq + 1);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      axis.values.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError("axis value '" + item + "' is not an integer");
    }
  }
  if (axis.values.empty()) throw ConfigError("axis '" + axis.name + "' has no values");
  return axis;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& out_path, bool strict_oom,
            std::ostream& log) {
  const TaskSpec task = build_task(cfg);
  const LossSpec<float> loss = build_loss(cfg, task);
  const Weights<float> weights = Weights<float>::init(cfg.network);

  std::vector<std::string> cols = ledger_columns();
  cols.push_back("loss");
  cols.push_back("grad_checksum");
  cols.push_back("oom");
  CsvWriter csv(cols);

  bool any_oom = false;
  for (int rep = 0; rep < cfg.repetitions; ++rep) {
    EngineOptions opts;
    opts.capacity_slots = cfg.capacity_slots;
    opts.exec = cfg.exec();
    try {
      TrainingStepResult result =
          run_training_step(weights, task.inputs, cfg.network, loss, cfg.policy, cfg.costs, opts);
      auto row = ledger_row(cfg.policy, cfg.network.seq_len, result.ledger);
      row.push_back(field_g(result.loss));
      row.push_back(CsvWriter::field(static_cast<std::uint64_t>(gradient_checksum(result.grads))));
      row.push_back("false");
      csv.add_row(std::move(row));
    } catch (const OomError& e) {
      const auto [chunk, nl, rc] = policy_fields(cfg.policy);
      csv.add_row({strategy_name(cfg.policy.strategy), CsvWriter::field(cfg.network.seq_len),
                   CsvWriter::field(chunk), CsvWriter::field(nl), CsvWriter::field(rc),
                   CsvWriter::field(e.attempted_slots), CsvWriter::field(0.0),
                   CsvWriter::field(std::int64_t(0)), CsvWriter::field(std::int64_t(0)),
                   CsvWriter::field(std::int64_t(0)), CsvWriter::field(0.0),
                   CsvWriter::field(std::int64_t(0)), field_g(0.0), CsvWriter::field(std::int64_t(0)),
                   "true"});
      any_oom = true;
    }
  }

  const std::string text = csv.serialize();
  if (out_path.empty())
    log << text;
  else
    write_text_file(out_path, text);
  return any_oom && strict_oom ? 4 : 0;
}

namespace {

struct VerifyReport {
  std::ostream& out;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& measured,
             const std::string& predicted) {
    out << (ok ? "[ok]   " : "[FAIL] ") << name << ": measured=" << measured
        << " expected=" << predicted << "\n";
    if (!ok) ++failures;
  }
  void check_eq(const std::string& name, std::int64_t measured, std::int64_t predicted) {
    check(name, measured == predicted, std::to_string(measured), std::to_string(predicted));
  }
};

std::string first_divergence(const Gradients<float>& a, const Gradients<float>& b) {
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    auto scan = [&](const Tensor2<float>& x, const Tensor2<float>& y, const char* which) {
      for (int r = 0; r < x.rows(); ++r)
        for (int c = 0; c < x.cols(); ++c)
          if (std::memcmp(&x.at(r, c), &y.at(r, c), sizeof(float)) != 0)
            return "layer " + std::to_string(l) + " " + which + "[" + std::to_string(r) + "," +
                   std::to_string(c) + "]";
      return std::string();
    };
    std::string hit = scan(a.layers[l].w_in, b.layers[l].w_in, "w_in");
    if (!hit.empty()) return hit;
    hit = scan(a.layers[l].w_rec, b.layers[l].w_rec, "w_rec");
    if (!hit.empty()) return hit;
  }
  return "none";
}

}  // namespace

int cmd_verify(const ExperimentConfig& cfg, bool inject_fault, std::ostream& report) {
  if (cfg.network.seq_len > 512)
    throw ConfigError("verify enforces seq_len <= 512 (small-instance oracle battery)");

  const int T = cfg.network.seq_len;
  const std::int64_t m_s = cfg.network.state_slots();
  const TaskSpec task = build_task(cfg);
  const LossSpec<float> loss = build_loss(cfg, task);
  const Weights<float> weights = Weights<float>::init(cfg.network);
  VerifyReport rep{report};

  EngineOptions opts;
  opts.exec = cfg.exec();
  opts.cross_check = true;

  CheckpointPolicy base;
  base.strategy = Strategy::Base;
  const TrainingStepResult ref =
      run_training_step(weights, task.inputs, cfg.network, loss, base, cfg.costs, opts);
  const std::int64_t m_others = ref.ledger.peak_local_slots() - m_s * T;
  report << "instance: T=" << T << " layers=" << cfg.network.num_layers
         << " neurons=" << cfg.network.neurons_per_layer << " batch=" << cfg.network.batch_size
         << " M_s=" << m_s << " M_others=" << m_others << "\n";

  // Canonical hyperparameters for the battery.
  const int chunk = optimal_chunk_standard(T);
  const std::int64_t nb = ceil_div(T, chunk);
  std::vector<CheckpointPolicy> battery;
  {
    CheckpointPolicy p;
    p.strategy = Strategy::Standard;
    p.chunk_size = chunk;
    battery.push_back(p);
    p.strategy = Strategy::Remote;
    battery.push_back(p);
    p.strategy = Strategy::Hierarchical;
    p.nb_local = static_cast<int>(std::min<std::int64_t>(4, nb));
    battery.push_back(p);
    p.nb_local = static_cast<int>(nb);  // N_c = 0 branch
    battery.push_back(p);
    battery.push_back(optimal_double_min_memory(T, m_s, cfg.costs));
  }

  for (const auto& policy : battery) {
    const std::string tag = std::string(strategy_name(policy.strategy)) + "(chunk=" +
                            std::to_string(policy.chunk_size) +
                            (policy.strategy == Strategy::Hierarchical
                                 ? ",nb_local=" + std::to_string(policy.nb_local)
                                 : "") +
                            (policy.strategy == Strategy::Double
                                 ? ",remote=" + std::to_string(policy.remote_chunk_size)
                                 : "") +
                            ")";
    const TrainingStepResult got =
        run_training_step(weights, task.inputs, cfg.network, loss, policy, cfg.costs, opts);

    const bool grads_equal = bitwise_equal(got.grads, ref.grads);
    rep.check(tag + " gradient bits vs base", grads_equal,
              grads_equal ? "identical" : "diverge at " + first_divergence(got.grads, ref.grads),
              "identical");
    rep.check(tag + " loss bits vs base",
              std::memcmp(&got.loss, &ref.loss, sizeof(float)) == 0, field_g(got.loss),
              field_g(ref.loss));
    rep.check_eq(tag + " peak_local_slots",
                 got.ledger.peak_local_slots(),
                 predict_memory_slots(policy, T, m_s, m_others));
    const PolicyFootprint f = policy_footprint(policy, T);
    rep.check_eq(tag + " n_syncs", got.ledger.n_syncs(), f.n_syncs);
    rep.check_eq(tag + " n_transfers", got.ledger.n_transfers(), f.n_transfers);
    rep.check_eq(tag + " modeled_time_micro", got.ledger.modeled_time_micro(),
                 predict_time_micro(policy, T, m_s, cfg.costs));
    rep.check_eq(tag + " lif_steps", got.ledger.ops.lif_steps,
                 T + f.replay_steps + f.extra_replay_steps);
    rep.check_eq(tag + " spike_gen_calls", got.ledger.ops.spike_gen_calls, T);
    rep.check_eq(tag + " encode_calls", got.ledger.ops.encode_calls, T);
    rep.check(tag + " spike cache immutable",
              got.spike_hash_post_forward == got.spike_hash_post_backward, "hash", "hash");
  }

  if (inject_fault) {
    CheckpointPolicy faulty;
    faulty.strategy = Strategy::Standard;
    faulty.chunk_size = std::max(2, chunk);
    EngineOptions fault_opts = opts;
    fault_opts.inject_drop_spike = true;
    bool detected = false;
    std::string what;
    try {
      run_training_step(weights, task.inputs, cfg.network, loss, faulty, cfg.costs, fault_opts);
    } catch (const DeterminismViolationError& e) {
      detected = true;
      what = e.what();
    }
    rep.check("negative control: dropped cached spike detected", detected,
              detected ? what : "no error raised", "determinism-violation");
  }

  report << (rep.failures == 0 ? "verify: all assertions passed\n"
                               : "verify: " + std::to_string(rep.failures) + " assertion(s) FAILED\n");
  return rep.failures == 0 ? 0 : 3;
}

namespace {

void apply_axis(ExperimentConfig& cfg, const std::string& name, std::int64_t value) {
  if (name == "T")
    cfg.network.seq_len = static_cast<int>(value);
  else if (name == "chunk_size")
    cfg.policy.chunk_size = static_cast<int>(value);
  else if (name == "nb_local")
    cfg.policy.nb_local = static_cast<int>(value);
  else if (name == "remote_chunk_size")
    cfg.policy.remote_chunk_size = static_cast<int>(value);
  else if (name == "neurons_per_layer")
    cfg.network.neurons_per_layer = static_cast<int>(value);
}

}  // namespace

int cmd_sweep(const ExperimentConfig& cfg, const std::vector<SweepAxis>& axes,
              const std::string& out_path, std::ostream& log) {
  if (axes.empty()) throw ConfigError("sweep requires at least one --axis");

  std::vector<std::string> cols = ledger_columns();
  for (const char* c : {"predicted_peak_local_slots", "predicted_modeled_time",
                        "predicted_n_transfers", "predicted_n_syncs", "error"})
    cols.push_back(c);
  CsvWriter csv(cols);

  // Task and base-reference caches keyed by the instance identity.
  using InstanceKey = std::tuple<int, int, int, std::uint64_t, float>;
  std::map<InstanceKey, TaskSpec> task_cache;
  std::map<InstanceKey, std::int64_t> m_others_cache;

  std::vector<std::size_t> index(axes.size(), 0);
  bool done = false;
  while (!done) {
    ExperimentConfig point = cfg;
    for (std::size_t a = 0; a < axes.size(); ++a)
      apply_axis(point, axes[a].name, axes[a].values[index[a]]);

    try {
      point.network.validate();
      point.policy.validate(point.network.seq_len);
      const InstanceKey key{point.network.seq_len, point.network.neurons_per_layer,
                            point.network.batch_size, point.network.seed, point.poisson_rate};
      auto task_it = task_cache.find(key);
      if (task_it == task_cache.end())
        task_it = task_cache.emplace(key, build_task(point)).first;
      const TaskSpec& task = task_it->second;
      const LossSpec<float> loss = build_loss(point, task);
      const Weights<float> weights = Weights<float>::init(point.network);
      const std::int64_t m_s = point.network.state_slots();

      auto ref_it = m_others_cache.find(key);
      if (ref_it == m_others_cache.end()) {
        CheckpointPolicy base;
        base.strategy = Strategy::Base;
        EngineOptions ref_opts;
        ref_opts.exec = point.exec();
        const TrainingStepResult ref = run_training_step(weights, task.inputs, point.network,
                                                         loss, base, point.costs, ref_opts);
        ref_it = m_others_cache
                     .emplace(key, ref.ledger.peak_local_slots() - m_s * point.network.seq_len)
                     .first;
      }
      const std::int64_t m_others = ref_it->second;

      EngineOptions opts;
      opts.capacity_slots = point.capacity_slots;
      opts.exec = point.exec();
      const TrainingStepResult got = run_training_step(weights, task.inputs, point.network, loss,
                                                       point.policy, point.costs, opts);
      auto row = ledger_row(point.policy, point.network.seq_len, got.ledger);
      const PolicyFootprint f = policy_footprint(point.policy, point.network.seq_len);
      row.push_back(CsvWriter::field(
          predict_memory_slots(point.policy, point.network.seq_len, m_s, m_others)));
      row.push_back(CsvWriter::field(
          static_cast<double>(predict_time_micro(point.policy, point.network.seq_len, m_s,
                                                 point.costs)) /
          1e6));
      row.push_back(CsvWriter::field(f.n_transfers));
      row.push_back(CsvWriter::field(f.n_syncs));
      row.push_back("");
      csv.add_row(std::move(row));
    } catch (const std::exception& e) {
      const auto [chunk, nl, rc] = policy_fields(point.policy);
      std::vector<std::string> row = {strategy_name(point.policy.strategy),
                                      CsvWriter::field(point.network.seq_len),
                                      CsvWriter::field(chunk),
                                      CsvWriter::field(nl),
                                      CsvWriter::field(rc)};
      while (row.size() + 1 < csv.columns().size()) row.push_back("0");
      row.push_back(e.what());
      csv.add_row(std::move(row));
    }

    // Advance the grid index, last axis fastest.
    done = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++index[a] < axes[a].values.size()) {
        done = false;
        break;
      }
      index[a] = 0;
    }
  }

  const std::string text = csv.serialize();
  if (out_path.empty())
    log << text;
  else
    write_text_file(out_path, text);
  return 0;
}

int cmd_gen_task(const ExperimentConfig& cfg, const std::string& out_path, std::ostream& log) {
  const TaskSpec task = build_task(cfg);
  json root;
  root["seq_len"] = cfg.network.seq_len;
  root["batch_size"] = cfg.network.batch_size;
  root["neurons_per_layer"] = cfg.network.neurons_per_layer;
  root["poisson_rate"] = cfg.poisson_rate;
  root["target_counts"] = task.target_counts;
  json events = json::array();
  for (int t = 0; t < cfg.network.seq_len; ++t) {
    json step = json::array();
    for (std::uint32_t e : task.inputs.slice(t, 0))
      step.push_back({task.inputs.event_batch(e), task.inputs.event_neuron(e)});
    events.push_back(std::move(step));
  }
  root["events"] = std::move(events);
  const std::string text = root.dump(2) + "\n";
  if (out_path.empty())
    log << text;
  else
    write_text_file(out_path, text);
  return 0;
}

}  // namespace spikecp
