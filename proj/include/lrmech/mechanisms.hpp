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

#ifndef LRMECH_MECHANISMS_HPP_
#define LRMECH_MECHANISMS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lrmech/matrix.hpp"
#include "lrmech/workload.hpp"

namespace lrmech {

// Privacy budget for pure epsilon-differential privacy.
struct PrivacyBudget {
  double epsilon = 1.0;

  explicit PrivacyBudget(double eps);
};

// Which mechanism produced an answer. The numeric values double as salts for
// per-mechanism seed streams, so they are part of the reproducibility
// contract and must not be renumbered.
enum class Mechanism : std::uint64_t { kNod = 1, kNor = 2, kLrm = 3, kAmm = 4 };

const char* mechanism_name(Mechanism tag);
Mechanism mechanism_from_name(const std::string& name);

// A factorization W ~= B * L. `residual` and `max_col_l1` are computed at
// construction from (b, l, w) so they can never drift from the matrices.
struct Decomposition {
  Matrix b;            // m x r
  Matrix l;            // r x n
  double residual;     // ||w - b*l||_F
  double max_col_l1;   // max_j sum_i |l_ij|

  Decomposition(Matrix b_in, Matrix l_in, const Matrix& w);

  int r() const { return b.cols(); }

  // Recomputes both derived fields against w and throws if either disagrees
  // with the stored value by more than 1e-10 (relative to scale).
  void validate(const Matrix& w) const;
};

struct NoisyAnswer {
  std::vector<double> values;  // length m
  Mechanism tag;
  std::uint64_t seed;
};

// `count` i.i.d. zero-mean Laplace(scale) draws from the stream seeded with
// `seed`. scale must be > 0.
std::vector<double> sample_laplace(double scale, int count, std::uint64_t seed);

// Query scale Phi(B, L) = sum of squared entries of B: how much the
// recombination step amplifies noise.
double query_scale(const Matrix& b);

// Query sensitivity Delta(B, L) = max column absolute sum of L: the L1
// sensitivity of the intermediate answers L * D under unit counts.
double query_sensitivity(const Matrix& l);

// Noise-on-data baseline: W * (D + Lap(1/eps)^n).
NoisyAnswer answer_nod(const Matrix& w, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed);

// Noise-on-results baseline: W * D + Lap(Delta'/eps)^m with Delta' the max
// column absolute sum of W. A zero workload (Delta' = 0) degenerates to the
// exact answer; that case logs a warning and adds no noise.
NoisyAnswer answer_nor(const Matrix& w, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed);

// Low-rank mechanism: B * (L * D + Lap(Delta(B,L)/eps)^r). Like answer_nor,
// Delta(B,L) = 0 (only possible when L = 0) is a noiseless degenerate case.
NoisyAnswer answer_lrm(const Decomposition& dec, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed);

// Closed-form expected squared errors (totals over all m queries).
double expected_error_nod(const Matrix& w, const PrivacyBudget& eps);
double expected_error_nor(const Matrix& w, const PrivacyBudget& eps);

// 2 * Phi(B,L) * Delta(B,L)^2 / eps^2: exact expectation when W = BL.
double expected_error_lrm(const Decomposition& dec, const PrivacyBudget& eps);

// Upper bound for an inexact decomposition: 2 * tr(B^T B) / eps^2 +
// residual * sum_i x_i^2. Valid for decompositions with max_col_l1 <= 1.
double expected_error_lrm_relaxed(const Decomposition& dec, const PrivacyBudget& eps,
                                  const Dataset& d);

}  // namespace lrmech

#endif  // LRMECH_MECHANISMS_HPP_
