// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace spikecp {

// Kernel lane selection. The serial lane is the reference and the default;
// the OpenMP lane partitions output elements only, never reductions, so both
// lanes produce bitwise-identical results (asserted in tests).
struct ExecPolicy {
  bool parallel = false;
  int threads = 0;  // 0 = OpenMP default

  static ExecPolicy serial() { return {}; }
  static ExecPolicy openmp(int threads = 0) { return {true, threads}; }
};

}  // namespace spikecp
