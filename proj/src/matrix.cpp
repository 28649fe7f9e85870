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

#include "lrmech/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lrmech {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

Matrix::Matrix(int rows, int cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("Matrix: negative dimension");
  }
  data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

Matrix::Matrix(int rows, int cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("Matrix: negative dimension");
  }
  if (data_.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("Matrix: entry count " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  if (!all_finite()) {
    throw std::invalid_argument("Matrix: non-finite entry");
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  check_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  check_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  return *this;
}

Matrix operator+(Matrix lhs, const Matrix& rhs) {
  lhs += rhs;
  return lhs;
}

Matrix operator-(Matrix lhs, const Matrix& rhs) {
  lhs -= rhs;
  return lhs;
}

Matrix operator*(double scalar, Matrix m) {
  m *= scalar;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.rows()));
  }
  Matrix out(a.rows(), b.cols());
  // i-k-j order: the inner loop walks contiguous rows of b and out.
  for (int i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* b_row = b.row(k);
      for (int j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

std::vector<double> mat_vec(const Matrix& a, const std::vector<double>& x) {
  if (static_cast<std::size_t>(a.cols()) != x.size()) {
    throw std::invalid_argument("mat_vec: matrix cols " + std::to_string(a.cols()) +
                                " vs vector length " + std::to_string(x.size()));
  }
  std::vector<double> y(a.rows(), 0.0);
  for (int i = 0; i < a.rows(); ++i) {
    const double* row = a.row(i);
    double acc = 0.0;
    for (int j = 0; j < a.cols(); ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

double dot(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "dot");
  const double* pa = a.data();
  const double* pb = b.data();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += pa[i] * pb[i];
  return acc;
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_matrix: cannot open '" + path + "' for writing");
  }
  out << m.rows() << " " << m.cols() << "\n";
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j > 0) out << " ";
      out << buf;
    }
    out << "\n";
  }
  if (!out) {
    throw std::runtime_error("save_matrix: write to '" + path + "' failed");
  }
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_matrix: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_matrix: '" + path + "' is empty");
  }
  std::istringstream header(line);
  int rows = 0;
  int cols = 0;
  if (!(header >> rows >> cols) || rows < 1 || cols < 1) {
    throw std::runtime_error("load_matrix: '" + path +
                             "' line 1: expected positive 'rows cols'");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw std::runtime_error("load_matrix: '" + path + "' line " +
                               std::to_string(i + 2) + ": unexpected end of file");
    }
    std::istringstream row_in(line);
    for (int j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!(row_in >> v)) {
        throw std::runtime_error("load_matrix: '" + path + "' line " +
                                 std::to_string(i + 2) + ": expected " +
                                 std::to_string(cols) + " entries");
      }
      if (!std::isfinite(v)) {
        throw std::runtime_error("load_matrix: '" + path + "' line " +
                                 std::to_string(i + 2) + ": non-finite entry");
      }
      m(i, j) = v;
    }
    double extra = 0.0;
    if (row_in >> extra) {
      throw std::runtime_error("load_matrix: '" + path + "' line " +
                               std::to_string(i + 2) + ": more than " +
                               std::to_string(cols) + " entries");
    }
  }
  return m;
}

}  // namespace lrmech
