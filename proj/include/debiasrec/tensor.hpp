// Copyright (c) 2026 The DebiasRec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace debiasrec {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense vector of doubles. The length is fixed at construction.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vec(std::initializer_list<double> init) : data_(init) {}
  explicit Vec(std::vector<double> data) : data_(std::move(data)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::span<double> span() { return data_; }
  std::span<const double> span() const { return data_; }

  const std::vector<double>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  std::vector<double> data_;
};

// Row-major dense matrix. The shape is fixed at construction.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }
  std::span<double> row_span(std::size_t r) { return {row(r), cols_}; }
  std::span<const double> row_span(std::size_t r) const { return {row(r), cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a) + " vs " +
                     std::to_string(b) + ")");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = M x
inline void matvec(const Mat& m, std::span<const double> x, std::span<double> y) {
  require_same(m.cols(), x.size(), "matvec input");
  require_same(m.rows(), y.size(), "matvec output");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* w = m.row(r);
    double s = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) s += w[c] * x[c];
    y[r] = s;
  }
}

// x_grad += M^T dy
inline void matvec_t_acc(const Mat& m, std::span<const double> dy, std::span<double> dx) {
  require_same(m.rows(), dy.size(), "matvec_t dy");
  require_same(m.cols(), dx.size(), "matvec_t dx");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    const double* w = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) dx[c] += w[c] * g;
  }
}

// M_grad += dy x^T
inline void outer_acc(Mat& dm, std::span<const double> dy, std::span<const double> x) {
  require_same(dm.rows(), dy.size(), "outer dy");
  require_same(dm.cols(), x.size(), "outer x");
  for (std::size_t r = 0; r < dm.rows(); ++r) {
    const double g = dy[r];
    if (g == 0.0) continue;
    double* out = dm.row(r);
    for (std::size_t c = 0; c < dm.cols(); ++c) out[c] += g * x[c];
  }
}

inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

inline void check_finite(std::span<const double> x, const std::string& what) {
  if (!all_finite(x)) throw NumericError("non-finite value in " + what);
}

}  // namespace debiasrec
