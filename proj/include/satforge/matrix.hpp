// satforge/matrix.hpp
//
// Copyright 2026  The SATForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "satforge/errors.hpp"

namespace satforge {

// Dense row-major matrix. Instantiated with float for production math and
// with double for the gradient-check shadow path.
template <typename T>
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, T fill = T(0)) : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  T* row_ptr(std::size_t i) { return data.data() + i * cols; }
  const T* row_ptr(std::size_t i) const { return data.data() + i * cols; }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  template <typename U>
  Mat<U> cast() const {
    Mat<U> out(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }

  bool operator==(const Mat& other) const {
    return rows == other.rows && cols == other.cols && data == other.data;
  }
};

using Matrix = Mat<float>;

template <typename T>
bool all_finite(const Mat<T>& m) {
  for (T v : m.data)
    if (!std::isfinite(static_cast<double>(v))) return false;
  return true;
}

template <typename T>
void check_finite(const Mat<T>& m, const std::string& what) {
  if (!all_finite(m)) throw NumericError("non-finite values in " + what);
}

// c = a * b
template <typename T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  require(a.cols == b.rows, "matmul: inner dimensions differ (" + std::to_string(a.cols) +
                                " vs " + std::to_string(b.rows) + ")");
  Mat<T> c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const T* arow = a.row_ptr(i);
    T* crow = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const T aik = arow[k];
      const T* brow = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// c = a^T * b
template <typename T>
Mat<T> matmul_at_b(const Mat<T>& a, const Mat<T>& b) {
  require(a.rows == b.rows, "matmul_at_b: row counts differ");
  Mat<T> c(a.cols, b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    const T* arow = a.row_ptr(k);
    const T* brow = b.row_ptr(k);
    for (std::size_t i = 0; i < a.cols; ++i) {
      const T aki = arow[i];
      T* crow = c.row_ptr(i);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aki * brow[j];
    }
  }
  return c;
}

// c = a * b^T
template <typename T>
Mat<T> matmul_a_bt(const Mat<T>& a, const Mat<T>& b) {
  require(a.cols == b.cols, "matmul_a_bt: column counts differ");
  Mat<T> c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const T* arow = a.row_ptr(i);
    T* crow = c.row_ptr(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const T* brow = b.row_ptr(j);
      T acc = T(0);
      for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      crow[j] = acc;
    }
  }
  return c;
}

template <typename T>
Mat<T> transpose(const Mat<T>& a) {
  Mat<T> t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

template <typename T>
void add_row_vector(Mat<T>& m, const std::vector<T>& v) {
  require(m.cols == v.size(), "add_row_vector: width mismatch");
  for (std::size_t i = 0; i < m.rows; ++i) {
    T* row = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += v[j];
  }
}

template <typename T>
std::vector<T> column_sums(const Mat<T>& m) {
  std::vector<T> sums(m.cols, T(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    const T* row = m.row_ptr(i);
    for (std::size_t j = 0; j < m.cols; ++j) sums[j] += row[j];
  }
  return sums;
}

template <typename T>
std::vector<T> column_means(const Mat<T>& m) {
  require(m.rows > 0, "column_means: empty matrix");
  std::vector<T> means = column_sums(m);
  for (T& v : means) v /= static_cast<T>(m.rows);
  return means;
}

template <typename T>
Mat<T> hadamard(const Mat<T>& a, const Mat<T>& b) {
  require(a.rows == b.rows && a.cols == b.cols, "hadamard: shape mismatch");
  Mat<T> c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.data.size(); ++i) c.data[i] = a.data[i] * b.data[i];
  return c;
}

template <typename T>
Mat<T> hstack(const Mat<T>& a, const Mat<T>& b) {
  require(a.rows == b.rows, "hstack: row counts differ");
  Mat<T> c(a.rows, a.cols + b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    T* crow = c.row_ptr(i);
    const T* arow = a.row_ptr(i);
    const T* brow = b.row_ptr(i);
    for (std::size_t j = 0; j < a.cols; ++j) crow[j] = arow[j];
    for (std::size_t j = 0; j < b.cols; ++j) crow[a.cols + j] = brow[j];
  }
  return c;
}

}  // namespace satforge
