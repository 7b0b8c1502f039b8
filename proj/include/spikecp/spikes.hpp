// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace spikecp {

// Sparse spike events for a whole sequence. One event is a packed linear index
// batch * num_neurons + neuron, so ascending packed order is the canonical
// (batch, neuron) order the kernels and the determinism contract rely on.
class SpikeRecord {
 public:
  SpikeRecord() = default;
  SpikeRecord(int num_steps, int num_layers, int batch, int num_neurons)
      : num_steps_(num_steps),
        num_layers_(num_layers),
        batch_(batch),
        num_neurons_(num_neurons),
        slices_(static_cast<std::size_t>(num_steps) * num_layers) {}

  int num_steps() const { return num_steps_; }
  int num_layers() const { return num_layers_; }
  int batch() const { return batch_; }
  int num_neurons() const { return num_neurons_; }

  std::vector<std::uint32_t>& slice(int t, int layer) {
    return slices_[static_cast<std::size_t>(t) * num_layers_ + layer];
  }
  const std::vector<std::uint32_t>& slice(int t, int layer) const {
    return slices_[static_cast<std::size_t>(t) * num_layers_ + layer];
  }

  std::uint32_t pack(int b, int n) const {
    return static_cast<std::uint32_t>(b) * num_neurons_ + n;
  }
  int event_batch(std::uint32_t e) const { return static_cast<int>(e) / num_neurons_; }
  int event_neuron(std::uint32_t e) const { return static_cast<int>(e) % num_neurons_; }

  std::int64_t total_events() const {
    std::int64_t n = 0;
    for (const auto& s : slices_) n += static_cast<std::int64_t>(s.size());
    return n;
  }

  // FNV-1a over slice lengths and event words; detects any mutation.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t x) {
      for (int k = 0; k < 8; ++k) {
        h ^= (x >> (8 * k)) & 0xff;
        h *= 1099511628211ull;
      }
    };
    for (const auto& s : slices_) {
      mix(s.size());
      for (std::uint32_t e : s) mix(e);
    }
    return h;
  }

  // Canonical order check for one slice: strictly increasing packed indices.
  static bool slice_canonical(const std::vector<std::uint32_t>& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] <= s[i - 1]) return false;
    return true;
  }

 private:
  int num_steps_ = 0;
  int num_layers_ = 0;
  int batch_ = 0;
  int num_neurons_ = 0;
  std::vector<std::vector<std::uint32_t>> slices_;
};

}  // namespace spikecp
