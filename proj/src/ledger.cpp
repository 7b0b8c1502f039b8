// SPDX-License-Identifier: Apache-2.0

#include "spikecp/ledger.hpp"

#include <algorithm>
#include <string>

namespace spikecp {

std::vector<std::int64_t> MemoryLedger::even_share(std::int64_t slots) const {
  const int tiles = static_cast<int>(tile_current_.size());
  std::vector<std::int64_t> share(tiles, slots / tiles);
  const std::int64_t rem = slots % tiles;
  for (int i = 0; i < rem; ++i) share[i] += 1;
  return share;
}

void MemoryLedger::bump(std::int64_t slots, Category cat,
                        const std::vector<std::int64_t>& tile_share) {
  if (slots < 0) throw LedgerCorruptionError("negative allocation");
  if (capacity_ > 0 && current_ + slots > capacity_)
    throw OomError("simulated local memory exhausted: " + std::to_string(current_ + slots) +
                       " slots requested against capacity " + std::to_string(capacity_) +
                       " at timestep " + std::to_string(timestep_),
                   current_ + slots, capacity_, timestep_);
  current_ += slots;
  peak_ = std::max(peak_, current_);
  cat_current_[static_cast<int>(cat)] += slots;
  cat_peak_[static_cast<int>(cat)] =
      std::max(cat_peak_[static_cast<int>(cat)], cat_current_[static_cast<int>(cat)]);
  for (std::size_t i = 0; i < tile_share.size(); ++i) {
    tile_current_[i] += tile_share[i];
    tile_peak_[i] = std::max(tile_peak_[i], tile_current_[i]);
  }
}

void MemoryLedger::drop(std::int64_t slots, Category cat,
                        const std::vector<std::int64_t>& tile_share) {
  if (slots < 0) throw LedgerCorruptionError("negative free");
  if (current_ < slots) throw LedgerCorruptionError("free exceeds allocated total");
  if (cat_current_[static_cast<int>(cat)] < slots)
    throw LedgerCorruptionError("free exceeds category balance");
  current_ -= slots;
  cat_current_[static_cast<int>(cat)] -= slots;
  for (std::size_t i = 0; i < tile_share.size(); ++i) {
    if (tile_current_[i] < tile_share[i]) throw LedgerCorruptionError("tile balance negative");
    tile_current_[i] -= tile_share[i];
  }
}

void MemoryLedger::alloc(std::int64_t slots, Category cat) { bump(slots, cat, even_share(slots)); }

void MemoryLedger::free(std::int64_t slots, Category cat) { drop(slots, cat, even_share(slots)); }

void MemoryLedger::alloc_on_tile(std::int64_t slots, int tile, Category cat) {
  std::vector<std::int64_t> share(tile_current_.size(), 0);
  share[tile] = slots;
  bump(slots, cat, share);
}

void MemoryLedger::free_on_tile(std::int64_t slots, int tile, Category cat) {
  std::vector<std::int64_t> share(tile_current_.size(), 0);
  share[tile] = slots;
  drop(slots, cat, share);
}

void MemoryLedger::transfer_out(std::int64_t slots) {
  n_transfers_ += 1;
  remote_bytes_out_ += slots * 4;
}

void MemoryLedger::transfer_in(std::int64_t slots) {
  n_transfers_ += 1;
  remote_bytes_in_ += slots * 4;
}

void MemoryLedger::bulk_comms(std::int64_t comms, std::int64_t states_per_comm,
                              std::int64_t state_slots, std::int64_t time_micro_per_comm,
                              bool outbound) {
  if (comms <= 0) return;
  n_syncs_ += comms;
  n_transfers_ += comms * states_per_comm;
  const std::int64_t bytes = comms * states_per_comm * state_slots * 4;
  (outbound ? remote_bytes_out_ : remote_bytes_in_) += bytes;
  modeled_time_micro_ += comms * time_micro_per_comm;
}

void MemoryLedger::finalize() const {
  if (current_ != 0)
    throw LedgerCorruptionError("ledger not balanced at end of run: " +
                                std::to_string(current_) + " slots leaked");
  for (std::int64_t c : tile_current_)
    if (c != 0) throw LedgerCorruptionError("tile balance leaked");
}

std::int64_t MemoryLedger::max_tile_peak() const {
  std::int64_t m = 0;
  for (std::int64_t p : tile_peak_) m = std::max(m, p);
  return m;
}

double MemoryLedger::mean_tile_peak() const {
  if (tile_peak_.empty()) return 0.0;
  std::int64_t sum = 0;
  for (std::int64_t p : tile_peak_) sum += p;
  return static_cast<double>(sum) / static_cast<double>(tile_peak_.size());
}

}  // namespace spikecp
