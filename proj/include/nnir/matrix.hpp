// Copyright 2026 The nnir Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace nnir {

/// Row-major dense matrix of doubles. Rows are exposed as spans so kernels
/// can work on a single row without copying.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// y += M x
inline void gemv_acc(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(m.cols() == x.size() && m.rows() == y.size());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] += dot(m.row(r), x);
}

// y += M^T x
inline void gemv_t_acc(const Matrix& m, std::span<const double> x, std::span<double> y) {
  assert(m.rows() == x.size() && m.cols() == y.size());
  for (std::size_t r = 0; r < m.rows(); ++r) axpy(x[r], m.row(r), y);
}

// M += x y^T
inline void ger_acc(std::span<const double> x, std::span<const double> y, Matrix& m) {
  assert(m.rows() == x.size() && m.cols() == y.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (x[r] != 0.0) axpy(x[r], y, m.row(r));
  }
}

}  // namespace nnir
