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

#include "lrmech/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lrmech {

namespace {

// Sweep caps for the Jacobi iterations. Cyclic Jacobi converges quadratically
// once it locks in; these are far beyond anything observed at desk scale.
constexpr int kMaxEigSweeps = 64;
constexpr int kMaxSvdSweeps = 60;

// Relative off-diagonal targets.
constexpr double kEigOffTol = 1e-14;
constexpr double kSvdOrthTol = 1e-15;

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": matrix is " +
                                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                ", expected square");
  }
}

void require_symmetric(const Matrix& a, const char* op) {
  require_square(a, op);
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.cols(); ++j) {
      const double x = a(i, j);
      const double y = a(j, i);
      const double scale = std::max({1.0, std::abs(x), std::abs(y)});
      if (std::abs(x - y) > 1e-10 * scale) {
        throw std::invalid_argument(std::string(op) + ": matrix not symmetric at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

// One-sided Jacobi: rotate pairs of rows of x until all pairs are mutually
// orthogonal relative to their norms, accumulating the inverse rotations in
// the columns of u so that u * x is preserved. Returns the sweep count.
int orthogonalize_rows(Matrix& x, Matrix& u) {
  const int m = x.rows();
  const int n = x.cols();
  for (int sweep = 1; sweep <= kMaxSvdSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < m - 1; ++p) {
      for (int q = p + 1; q < m; ++q) {
        double* xp = x.row(p);
        double* xq = x.row(q);
        double a = 0.0, b = 0.0, g = 0.0;
        for (int j = 0; j < n; ++j) {
          a += xp[j] * xp[j];
          b += xq[j] * xq[j];
          g += xp[j] * xq[j];
        }
        if (std::abs(g) <= kSvdOrthTol * std::sqrt(a) * std::sqrt(b)) continue;
        const double theta = (b - a) / (2.0 * g);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          const double sign = theta >= 0.0 ? 1.0 : -1.0;
          t = sign / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int j = 0; j < n; ++j) {
          const double vp = xp[j];
          const double vq = xq[j];
          xp[j] = c * vp - s * vq;
          xq[j] = s * vp + c * vq;
        }
        for (int i = 0; i < m; ++i) {
          const double up = u(i, p);
          const double uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        rotated = true;
      }
    }
    if (!rotated) return sweep;
  }
  throw std::runtime_error("svd: row orthogonalization did not converge after " +
                           std::to_string(kMaxSvdSweeps) + " sweeps");
}

// Fill rows [filled, total) of v with an orthonormal completion: repeatedly
// pick the canonical basis vector with the largest residual after projecting
// out every row already present, orthogonalize it twice, and normalize.
void complete_orthonormal_rows(Matrix& v, int filled) {
  const int n = v.cols();
  std::vector<double> cand(n);
  for (int k = filled; k < v.rows(); ++k) {
    int best_axis = -1;
    double best_norm2 = -1.0;
    for (int axis = 0; axis < n; ++axis) {
      double norm2 = 1.0;
      for (int r = 0; r < k; ++r) {
        norm2 -= v(r, axis) * v(r, axis);  // |e_axis - proj|^2 = 1 - sum of coeffs^2
      }
      if (norm2 > best_norm2) {
        best_norm2 = norm2;
        best_axis = axis;
      }
    }
    std::fill(cand.begin(), cand.end(), 0.0);
    cand[best_axis] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int r = 0; r < k; ++r) {
        const double* vr = v.row(r);
        double coeff = 0.0;
        for (int j = 0; j < n; ++j) coeff += vr[j] * cand[j];
        for (int j = 0; j < n; ++j) cand[j] -= coeff * vr[j];
      }
    }
    double norm = 0.0;
    for (int j = 0; j < n; ++j) norm += cand[j] * cand[j];
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      throw std::runtime_error("svd: orthonormal completion failed");
    }
    for (int j = 0; j < n; ++j) v(k, j) = cand[j] / norm;
  }
}

// SVD for the wide orientation (rows <= cols), rows of w being the vectors
// the Jacobi rotations act on.
SvdResult svd_wide(const Matrix& w) {
  const int m = w.rows();
  const int n = w.cols();
  Matrix x = w;
  Matrix u = Matrix::identity(m);
  orthogonalize_rows(x, u);

  std::vector<double> norms(m);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* xi = x.row(i);
    for (int j = 0; j < n; ++j) acc += xi[j] * xi[j];
    norms[i] = std::sqrt(acc);
  }
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return norms[a] > norms[b]; });

  SvdResult result;
  result.sigma.resize(m);
  result.u = Matrix(m, m);
  result.v = Matrix(m, n);
  int filled = 0;
  for (int k = 0; k < m; ++k) {
    const int src = order[k];
    result.sigma[k] = norms[src];
    for (int i = 0; i < m; ++i) result.u(i, k) = u(i, src);
    if (norms[src] > 0.0) {
      const double inv = 1.0 / norms[src];
      const double* xs = x.row(src);
      for (int j = 0; j < n; ++j) result.v(k, j) = xs[j] * inv;
      filled = k + 1;
    }
  }
  complete_orthonormal_rows(result.v, filled);

  const double cutoff = kRankTolerance * result.sigma[0];
  int rank = 0;
  for (double s : result.sigma) {
    if (s > cutoff && s > 0.0) ++rank;
  }
  result.rank = rank;
  return result;
}

}  // namespace

double trace(const Matrix& a) {
  require_square(a, "trace");
  double acc = 0.0;
  for (int i = 0; i < a.rows(); ++i) acc += a(i, i);
  return acc;
}

double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  const double* p = a.data();
  for (std::size_t i = 0; i < a.size(); ++i) acc += p[i] * p[i];
  return std::sqrt(acc);
}

Matrix solve_spd(const Matrix& a, const Matrix& rhs) {
  require_symmetric(a, "solve_spd");
  if (rhs.rows() != a.rows()) {
    throw std::invalid_argument("solve_spd: rhs has " + std::to_string(rhs.rows()) +
                                " rows, expected " + std::to_string(a.rows()));
  }
  const int n = a.rows();

  Matrix chol(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= chol(j, k) * chol(j, k);
    if (!(d > 0.0)) {
      throw std::runtime_error("solve_spd: matrix not positive definite (pivot " +
                               std::to_string(j) + " = " + std::to_string(d) + ")");
    }
    const double ljj = std::sqrt(d);
    chol(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double acc = a(i, j);
      for (int k = 0; k < j; ++k) acc -= chol(i, k) * chol(j, k);
      chol(i, j) = acc / ljj;
    }
  }

  // Forward then backward substitution, all right-hand sides at once.
  Matrix y = rhs;
  const int c = y.cols();
  for (int i = 0; i < n; ++i) {
    double* yi = y.row(i);
    for (int k = 0; k < i; ++k) {
      const double lik = chol(i, k);
      if (lik == 0.0) continue;
      const double* yk = y.row(k);
      for (int j = 0; j < c; ++j) yi[j] -= lik * yk[j];
    }
    const double inv = 1.0 / chol(i, i);
    for (int j = 0; j < c; ++j) yi[j] *= inv;
  }
  for (int i = n - 1; i >= 0; --i) {
    double* yi = y.row(i);
    for (int k = i + 1; k < n; ++k) {
      const double lki = chol(k, i);
      if (lki == 0.0) continue;
      const double* yk = y.row(k);
      for (int j = 0; j < c; ++j) yi[j] -= lki * yk[j];
    }
    const double inv = 1.0 / chol(i, i);
    for (int j = 0; j < c; ++j) yi[j] *= inv;
  }
  return y;
}

SymEigResult sym_eig(const Matrix& m) {
  require_symmetric(m, "sym_eig");
  const int n = m.rows();

  // Work on the exactly-symmetrized copy so the rotations preserve symmetry.
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  }
  Matrix v = Matrix::identity(n);

  const double frob = frobenius_norm(a);
  int sweep = 0;
  bool converged = false;
  for (sweep = 0; sweep < kMaxEigSweeps; ++sweep) {
    double off2 = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off2 += 2.0 * a(p, q) * a(p, q);
    }
    if (std::sqrt(off2) <= kEigOffTol * std::max(frob, 1e-300)) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-18 * (std::abs(a(p, p)) + std::abs(a(q, q)))) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 1.0 / (2.0 * theta);
        } else {
          const double sign = theta >= 0.0 ? 1.0 : -1.0;
          t = sign / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(p, i) = a(i, p);
          a(i, q) = s * aip + c * aiq;
          a(q, i) = a(i, q);
        }
        for (int i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = c * vip - s * viq;
          v(i, q) = s * vip + c * viq;
        }
      }
    }
  }
  if (!converged) {
    throw std::runtime_error("sym_eig: Jacobi iteration did not converge after " +
                             std::to_string(sweep) + " sweeps");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) > a(y, y); });

  SymEigResult result;
  result.values.resize(n);
  result.vectors = Matrix(n, n);
  for (int k = 0; k < n; ++k) {
    result.values[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) result.vectors(i, k) = v(i, order[k]);
  }
  return result;
}

SvdResult svd(const Matrix& w) {
  if (w.rows() == 0 || w.cols() == 0) {
    throw std::invalid_argument("svd: empty matrix");
  }
  if (!w.all_finite()) {
    throw std::invalid_argument("svd: non-finite entry");
  }
  if (w.rows() <= w.cols()) {
    return svd_wide(w);
  }
  SvdResult t = svd_wide(transpose(w));
  SvdResult result;
  result.u = transpose(t.v);
  result.sigma = std::move(t.sigma);
  result.v = transpose(t.u);
  result.rank = t.rank;
  return result;
}

Matrix pseudo_inverse(const Matrix& a) {
  const SvdResult s = svd(a);
  Matrix out(a.cols(), a.rows());
  for (int k = 0; k < s.rank; ++k) {
    const double inv = 1.0 / s.sigma[k];
    for (int i = 0; i < a.cols(); ++i) {
      const double vki = s.v(k, i) * inv;
      if (vki == 0.0) continue;
      for (int j = 0; j < a.rows(); ++j) out(i, j) += vki * s.u(j, k);
    }
  }
  return out;
}

}  // namespace lrmech
