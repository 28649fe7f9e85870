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

#ifndef LRMECH_LRM_SOLVER_HPP_
#define LRMECH_LRM_SOLVER_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lrmech/matrix.hpp"
#include "lrmech/mechanisms.hpp"

namespace lrmech {

// Configuration for the decomposition solver: an inexact augmented-Lagrangian
// outer loop whose subproblem alternates a closed-form B step with an
// accelerated projected-gradient L step.
//
// The solver minimizes tr(B^T B) subject to ||W - B*L||_F staying within the
// residual tolerance and every column of L having L1 norm at most 1.
struct SolverConfig {
  // Decomposition rank. 0 means automatic: ceil(1.2 * rank(W)), at least 1.
  int r = 0;

  // Residual tolerance, relative: the outer loop stops once
  // ||W - B*L||_F <= gamma * max(1, ||W||_F).
  double gamma = 0.01;

  double beta0 = 1.0;        // initial penalty
  double beta_growth = 2.0;  // multiplier applied to the penalty...
  int beta_period = 10;      // ...once every beta_period outer iterations
  int max_outer = 200;

  // Penalty ceiling ("beta sufficiently large" stop). 0 means automatic:
  // 2^30 * beta0.
  double max_beta = 0.0;

  // Inner alternation: stop when the subproblem objective J changes by less
  // than inner_tol relative over one (B, L) sweep, or after inner_max_sweeps.
  double inner_tol = 1e-6;
  int inner_max_sweeps = 50;

  // Accelerated L solve: stop when the projected step moves less than chi in
  // Frobenius norm (0 means automatic: r * n * 1e-12), with an iteration cap
  // and a cap on step-halving (doubling of the curvature estimate) per step.
  double nesterov_chi = 0.0;
  int nesterov_max_iters = 2000;
  int backtrack_max_doublings = 60;

  // Initialization RNG seed. The first start is deterministic (SVD-based);
  // the seed feeds the redrawn starting points used when the outer loop
  // detects stagnation, and is recorded in persisted metadata. Runs are
  // reproducible given (w, cfg).
  std::uint64_t seed = 0;

  void validate() const;
};

struct OuterRecord {
  double objective;  // 0.5 * tr(B^T B) at the end of the outer iteration
  double residual;   // tau = ||W - B*L||_F
  double beta;
  int inner_sweeps;
};

struct SolveTrace {
  std::vector<OuterRecord> outer;
  std::string termination;  // "converged", "penalty-limit" or "budget-exhausted"
  int returned_outer = -1;  // index into `outer` of the returned iterate
};

// SVD-derived diagnostics: an upper bound on the achievable objective, the
// shape of the information-theoretic lower bound (its leading constant is not
// specified, so it is a diagnostic, never an assertion target), the spectral
// ratio C, and the (C/4)^2 * r approximation factor. upper/lower are on the
// trace scale; divide by eps^2 for the error scale.
struct BoundReport {
  int rank = 0;
  std::vector<double> lambdas;  // singular values above the rank cutoff
  double upper = 0.0;           // r * sum_k lambda_k^2
  double lower = 0.0;           // (2^r / r!)^(2/r) * (prod_k lambda_k)^(2/r) * r^3
  double c_ratio = 1.0;         // lambda_1 / lambda_r
  double approx_factor = 0.0;   // (c_ratio / 4)^2 * r
  double epsilon = 1.0;

  double upper_error() const { return upper / (epsilon * epsilon); }
  double lower_error() const { return lower / (epsilon * epsilon); }
};

struct NesterovResult {
  Matrix l;
  int iterations = 0;
  bool hit_iteration_cap = false;
};

// Euclidean projection onto {u : ||u||_1 <= radius}, by the sort-based
// threshold method. Exact feasibility of the result is guaranteed (the
// computed L1 norm is <= radius in floating point), which makes the
// projection exactly idempotent.
std::vector<double> project_l1_ball(const std::vector<double>& v, double radius);

// Apply project_l1_ball to every column of l.
Matrix project_columns_l1(const Matrix& l, double radius);

// Closed-form minimizer of the subproblem in B:
// B = (beta*W*L^T + pi*L^T) * (beta*L*L^T + I)^{-1}.
Matrix update_b(const Matrix& l, const Matrix& w, const Matrix& pi, double beta);

// The L-subproblem objective
//   G(L) = (beta/2) tr(L^T B^T B L) - tr((beta*W + pi)^T B L)
// and, when `gradient` is non-null, its gradient
//   beta*B^T*B*L - beta*B^T*W - B^T*pi.
double inner_objective_l(const Matrix& l, const Matrix& b, const Matrix& w, const Matrix& pi,
                         double beta, Matrix* gradient = nullptr);

// Full subproblem objective J(B, L) = 0.5 tr(B^T B) + <pi, W - BL> +
// (beta/2) ||W - BL||_F^2 (G plus terms constant in L).
double alm_objective(const Matrix& b, const Matrix& l, const Matrix& w, const Matrix& pi,
                     double beta);

// Accelerated projected-gradient descent on G(L) over the per-column L1 ball,
// warm-started from l0 (projected if infeasible). Momentum, step backtracking
// and the chi stop rule follow the standard accelerated scheme; the returned
// iterate is the best feasible one seen, so G never increases versus l0.
NesterovResult nesterov_solve_l(const Matrix& b, const Matrix& w, const Matrix& pi, double beta,
                                const Matrix& l0, const SolverConfig& cfg);

// Feasible starting point: L0 rows are the leading right-singular rows of W
// scaled by 1/sqrt(r) (zero rows beyond min(r, min(m,n))), which keeps every
// column L1 norm at most 1; B0 is the closed-form B step at pi = 0.
std::pair<Matrix, Matrix> init_decomposition(const Matrix& w, const SolverConfig& cfg);

// Run the full solver. On "budget-exhausted" the iterate with the smallest
// residual is returned; otherwise the final iterate.
std::pair<Decomposition, SolveTrace> decompose(const Matrix& w, const SolverConfig& cfg);

// Spectral bound diagnostics; rejects rank-zero (all-zero) workloads.
BoundReport bound_report(const Matrix& w, const PrivacyBudget& eps);

// Persistence: `B.mat` and `L.mat` in the matrix text format plus a `meta`
// file of `key = value` lines (r, gamma, residual, max_col_l1, seed,
// termination).
struct DecompositionMeta {
  int r = 0;
  double gamma = 0.0;
  double residual = 0.0;
  double max_col_l1 = 0.0;
  std::uint64_t seed = 0;
  std::string termination;
};

void save_decomposition(const std::string& dir, const Decomposition& dec, double gamma,
                        std::uint64_t seed, const std::string& termination);

// Loads and revalidates a persisted decomposition against the workload it was
// built for (stored residual/max_col_l1 must match recomputed values).
std::pair<Decomposition, DecompositionMeta> load_decomposition(const std::string& dir,
                                                               const Matrix& w);

}  // namespace lrmech

#endif  // LRMECH_LRM_SOLVER_HPP_
