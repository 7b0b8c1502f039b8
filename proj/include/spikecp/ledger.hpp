// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "spikecp/errors.hpp"
#include "spikecp/network.hpp"

namespace spikecp {

// Unit costs in abstract time units. Doubles at the configuration surface,
// converted once to integer micro-units so that event-by-event ledger sums and
// closed-form predictions can be compared with zero tolerance.
struct CostModel {
  double lif_step = 0.08;   // matmul + state update; the only cost recomputation pays
  double spike_gen = 1.0;   // threshold evaluation
  double encode = 0.05;     // sparse event list construction
  double bwd_step = 2.0;
  double bandwidth_slots_per_unit = 64.0;  // checkpoint transfer rate; T_c = slots / bandwidth
  double sync_time = 5.0;                  // T_s

  static std::int64_t micro(double units) {
    return static_cast<std::int64_t>(units * 1e6 + (units >= 0 ? 0.5 : -0.5));
  }

  std::int64_t lif_micro() const { return micro(lif_step); }
  std::int64_t fwd_step_micro() const {
    return micro(lif_step) + micro(spike_gen) + micro(encode);
  }
  std::int64_t bwd_micro() const { return micro(bwd_step); }
  std::int64_t tc_micro(std::int64_t checkpoint_slots) const {
    return micro(static_cast<double>(checkpoint_slots) / bandwidth_slots_per_unit);
  }
  std::int64_t ts_micro() const { return micro(sync_time); }

  void validate() const {
    if (lif_step < 0 || spike_gen < 0 || encode < 0 || bwd_step < 0 || sync_time < 0)
      throw ConfigError("cost model entries must be >= 0");
    if (!(bandwidth_slots_per_unit > 0)) throw ConfigError("bandwidth must be > 0");
  }
};

// Simulated local-memory ledger. The unit is one state slot (one scalar of
// NetworkState); peaks are integer-exact by construction. Per-tile peaks come
// from splitting every allocation across the virtual tiles (state tensors are
// neuron-partitioned so their split is exact; spike events are charged to the
// tile owning the neuron).
class MemoryLedger {
 public:
  enum class Category { State, Weights, SpikeCache, Work };
  static constexpr int kNumCategories = 4;

  MemoryLedger() : MemoryLedger(1, 0) {}
  MemoryLedger(int virtual_tiles, std::int64_t capacity_slots)
      : capacity_(capacity_slots),
        tile_current_(virtual_tiles, 0),
        tile_peak_(virtual_tiles, 0) {}

  void set_timestep(int t) { timestep_ = t; }
  int timestep() const { return timestep_; }

  // Evenly split allocation; remainder slots go to the lowest tiles.
  void alloc(std::int64_t slots, Category cat);
  void free(std::int64_t slots, Category cat);
  // Single-tile allocation (spike events charged to the owning neuron's tile).
  void alloc_on_tile(std::int64_t slots, int tile, Category cat);
  void free_on_tile(std::int64_t slots, int tile, Category cat);

  void transfer_out(std::int64_t slots);
  void transfer_in(std::int64_t slots);
  void sync() { n_syncs_ += 1; }
  void charge_time(std::int64_t micro) { modeled_time_micro_ += micro; }

  // The paper's batched-communication bookkeeping (hierarchical): `comms`
  // synchronizations, each moving `states_per_comm` checkpoints.
  void bulk_comms(std::int64_t comms, std::int64_t states_per_comm, std::int64_t state_slots,
                  std::int64_t time_micro_per_comm, bool outbound);

  // Everything allocated must have been freed; called at end of a run.
  void finalize() const;

  std::int64_t current_local_slots() const { return current_; }
  std::int64_t peak_local_slots() const { return peak_; }
  const std::vector<std::int64_t>& per_tile_peak_slots() const { return tile_peak_; }
  std::int64_t max_tile_peak() const;
  double mean_tile_peak() const;
  std::int64_t remote_bytes_in() const { return remote_bytes_in_; }
  std::int64_t remote_bytes_out() const { return remote_bytes_out_; }
  std::int64_t n_transfers() const { return n_transfers_; }
  std::int64_t n_syncs() const { return n_syncs_; }
  std::int64_t modeled_time_micro() const { return modeled_time_micro_; }
  double modeled_time() const { return static_cast<double>(modeled_time_micro_) / 1e6; }
  std::int64_t category_peak(Category cat) const {
    return cat_peak_[static_cast<int>(cat)];
  }
  std::int64_t spike_cache_slots() const { return category_peak(Category::SpikeCache); }

  OpCounters ops;

 private:
  void bump(std::int64_t slots, Category cat, const std::vector<std::int64_t>& tile_share);
  void drop(std::int64_t slots, Category cat, const std::vector<std::int64_t>& tile_share);
  std::vector<std::int64_t> even_share(std::int64_t slots) const;

  std::int64_t capacity_ = 0;  // 0 = unlimited
  std::int64_t current_ = 0;
  std::int64_t peak_ = 0;
  std::vector<std::int64_t> tile_current_;
  std::vector<std::int64_t> tile_peak_;
  std::int64_t cat_current_[kNumCategories] = {0, 0, 0, 0};
  std::int64_t cat_peak_[kNumCategories] = {0, 0, 0, 0};
  std::int64_t remote_bytes_in_ = 0;
  std::int64_t remote_bytes_out_ = 0;
  std::int64_t n_transfers_ = 0;
  std::int64_t n_syncs_ = 0;
  std::int64_t modeled_time_micro_ = 0;
  int timestep_ = -1;
};

}  // namespace spikecp
