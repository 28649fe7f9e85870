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

#ifndef LRMECH_AMM_SOLVER_HPP_
#define LRMECH_AMM_SOLVER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lrmech/matrix.hpp"
#include "lrmech/mechanisms.hpp"
#include "lrmech/workload.hpp"

namespace lrmech {

// Approximate matrix mechanism: pick a full-rank strategy matrix A by
// minimizing max(diag(M)) * tr(W^T W M^{-1}) over symmetric positive
// definite M = A^T A.  The non-smooth max(diag(M)) factor is replaced by
// a log-sum-exp surrogate with smoothing parameter mu, and the resulting
// smooth objective is driven down by spectral projected gradient descent
// on the positive definite cone.

struct AmmConfig {
  // Smoothing parameter for the soft-max surrogate.  Zero selects the
  // default 1e-2 / log(max(n, 2)).
  double mu = 0.0;
  // Eigenvalue floor enforced by the cone projection.  Zero selects the
  // default 1e-8 * trace(M0) / n, evaluated once at the initial iterate.
  double eig_floor = 0.0;
  int max_iters = 100;
  // Window length for the non-monotone acceptance rule.
  int nonmonotone_memory = 10;
  // Clamps for the Barzilai-Borwein step length.
  double alpha_min = 1e-10;
  double alpha_max = 1e10;
  // Sufficient-decrease constant in the acceptance test.
  double c1 = 1e-4;
  // Carried into persisted metadata; the solve itself is deterministic.
  std::uint64_t seed = 0;

  void validate() const;
};

struct AmmTrace {
  // Smoothed objective at the initial iterate followed by every accepted
  // step, in order.
  std::vector<double> objectives;
  // Smallest eigenvalue produced by the cone projection for each accepted
  // iterate (exact clipped values, recorded before the matrix is rebuilt).
  std::vector<double> min_eigenvalues;
  int iterations = 0;
  // "converged", "iteration-limit", or "step-collapse".
  std::string termination;
};

struct AmmSolution {
  // Symmetric positive definite Gram matrix of the strategy.
  Matrix m_matrix;
  // Strategy A = sum_i sqrt(lambda_i) v_i v_i^T, the symmetric square
  // root of m_matrix.
  Matrix strategy;
  // max(diag(M)) * tr(W^T W M^{-1}) at the returned M.
  double objective = 0.0;
  // Same product with the soft-max surrogate in place of the exact max;
  // this is the quantity the solver actually minimizes.
  double smoothed_objective = 0.0;
  double mu = 0.0;
  double eig_floor = 0.0;
  std::uint64_t seed = 0;
  AmmTrace trace;
};

// Overflow-stable log-sum-exp upper bound on max(v):
//   max(v) <= smoothed_max(v, mu) <= max(v) + mu * log(v.size()).
// Throws std::invalid_argument for an empty vector or mu <= 0.
double smoothed_max(const std::vector<double>& v, double mu);

// Gradient of smoothed_max: soft-max weights, positive and summing to 1.
std::vector<double> smoothed_max_grad(const std::vector<double>& v, double mu);

// Smoothed objective f_mu(diag(M)) * tr(W^T W M^{-1}).  When gradient is
// non-null it receives the n x n derivative, combining the soft-max
// weights on the diagonal with the trace-term gradient -M^{-1}KM^{-1}.
// M must be symmetric positive definite.
double amm_objective(const Matrix& m, const Matrix& w, double mu,
                     Matrix* gradient = nullptr);

// Nearest positive definite matrix with eigenvalues at least eig_floor:
// symmetrize, eigendecompose, clip, rebuild.  min_eig_out, when non-null,
// receives the smallest clipped eigenvalue.
Matrix project_cone(const Matrix& x, double eig_floor,
                    double* min_eig_out = nullptr);

// Runs the projected descent from M0 = I and returns the best iterate
// found together with the reconstructed strategy.  The workload must have
// full column rank; otherwise std::invalid_argument explains the remedy.
AmmSolution amm_solve(const Matrix& w, const AmmConfig& cfg);

// Publishes the strategy answers A d + Lap(sens(A)/eps) and maps them back
// through W A^+.  sens(A) is the largest column absolute sum of A.
NoisyAnswer answer_amm(const AmmSolution& sol, const Matrix& w,
                       const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed);

// Persists M.mat, A.mat and a key = value meta file into dir (created if
// needed); load reverses it and re-checks the solution invariants.
void save_amm_solution(const std::string& dir, const AmmSolution& sol);
AmmSolution load_amm_solution(const std::string& dir);

}  // namespace lrmech

#endif  // LRMECH_AMM_SOLVER_HPP_
