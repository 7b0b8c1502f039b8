// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

namespace spikecp {

// Dense row-major 2-D array. Deliberately minimal: the kernels index raw rows.
template <typename T>
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, T(0)) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t size() const { return static_cast<std::int64_t>(rows_) * cols_; }

  T* row(int r) { return data_.data() + static_cast<std::size_t>(r) * cols_; }
  const T* row(int r) const { return data_.data() + static_cast<std::size_t>(r) * cols_; }

  T& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  void fill(T value) {
    for (auto& x : data_) x = value;
  }

  bool all_finite() const {
    for (const T& x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  bool operator==(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// Bit-level equality; unlike operator== this distinguishes -0.0 from +0.0.
template <typename T>
bool bitwise_equal(const Tensor2<T>& a, const Tensor2<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  return std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(T)) == 0;
}

}  // namespace spikecp
