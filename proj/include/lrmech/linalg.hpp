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

#ifndef LRMECH_LINALG_HPP_
#define LRMECH_LINALG_HPP_

#include <vector>

#include "lrmech/matrix.hpp"

namespace lrmech {

// Numerical rank cutoff: singular values at or below kRankTolerance * sigma_1
// do not count toward the rank.
inline constexpr double kRankTolerance = 1e-9;

struct SvdResult {
  Matrix u;                   // m x s, orthonormal columns (s = min(m, n))
  std::vector<double> sigma;  // length s, non-ascending, all >= 0
  Matrix v;                   // s x n, orthonormal rows
  int rank = 0;               // |{k : sigma_k > kRankTolerance * sigma_1}|
};

struct SymEigResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // n x n, column k pairs with values[k]
};

double trace(const Matrix& a);

double frobenius_norm(const Matrix& a);

// Solve a * x = rhs for SPD a by Cholesky factorization; rhs may have any
// number of columns. Throws if a is not symmetric or a pivot fails.
Matrix solve_spd(const Matrix& a, const Matrix& rhs);

// Symmetric eigendecomposition by cyclic two-sided Jacobi rotations.
// Deterministic sweep order; throws with the sweep count if the off-diagonal
// mass has not vanished after the internal sweep limit.
SymEigResult sym_eig(const Matrix& m);

// Singular value decomposition W = U * diag(sigma) * V. Computed by driving
// the Gram matrix of the smaller dimension to diagonal form with Jacobi
// rotations applied one-sidedly (the rotations never form the Gram matrix
// explicitly, which keeps small singular values accurate at the same
// per-sweep cost). Deterministic; throws with the sweep count on
// non-convergence.
SvdResult svd(const Matrix& w);

// Moore-Penrose pseudo-inverse via svd() at the library rank tolerance.
Matrix pseudo_inverse(const Matrix& a);

}  // namespace lrmech

#endif  // LRMECH_LINALG_HPP_
