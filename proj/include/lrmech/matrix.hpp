// Copyright 2026 The lrmech Authors
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

#ifndef LRMECH_MATRIX_HPP_
#define LRMECH_MATRIX_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace lrmech {

// Dense real matrix with value semantics, row-major storage.
//
// This is deliberately small: the solvers in this library need deterministic,
// fixed-order kernels more than they need a full linear-algebra DSL, so the
// type only carries what the rest of the code actually uses. Entries are
// validated to be finite when a matrix is built from caller-supplied data
// (constructor with entries, file load); arithmetic on already-valid
// matrices does not re-validate.
class Matrix {
 public:
  Matrix() = default;

  // rows x cols, zero-filled.
  Matrix(int rows, int cols);

  // rows x cols from row-major entries. Throws std::invalid_argument if the
  // entry count does not match or any entry is NaN/Inf.
  Matrix(int rows, int cols, std::vector<double> entries);

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  // Raw row access for the hot loops (rows are contiguous).
  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * cols_; }
  const double* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * cols_;
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool all_finite() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scalar);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(double scalar, Matrix m);

// Matrix product (throws on dimension mismatch).
Matrix operator*(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

// a * x for a length-cols vector x.
std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x);

// Frobenius inner product sum_ij a_ij * b_ij.
double dot(const Matrix& a, const Matrix& b);

// Text serialization: first line "rows cols", then one row per line with
// space-separated entries printed at 17 significant digits, which makes the
// round-trip exact for doubles.
void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

}  // namespace lrmech

#endif  // LRMECH_MATRIX_HPP_
