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

#include "lrmech/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "lrmech/linalg.hpp"
#include "lrmech/rng.hpp"

namespace lrmech {

namespace {

double max_column_abs_sum(const Matrix& m) {
  double best = 0.0;
  for (int j = 0; j < m.cols(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < m.rows(); ++i) acc += std::abs(m(i, j));
    if (acc > best) best = acc;
  }
  return best;
}

void require_counts_match(int n, const Dataset& d, const char* op) {
  d.validate();
  if (d.n() != n) {
    throw std::invalid_argument(std::string(op) + ": dataset has " + std::to_string(d.n()) +
                                " counts, workload expects " + std::to_string(n));
  }
}

}  // namespace

PrivacyBudget::PrivacyBudget(double eps) : epsilon(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("PrivacyBudget: epsilon must be positive and finite");
  }
}

const char* mechanism_name(Mechanism tag) {
  switch (tag) {
    case Mechanism::kNod:
      return "NOD";
    case Mechanism::kNor:
      return "NOR";
    case Mechanism::kLrm:
      return "LRM";
    case Mechanism::kAmm:
      return "AMM";
  }
  throw std::logic_error("mechanism_name: bad enum value");
}

Mechanism mechanism_from_name(const std::string& name) {
  if (name == "NOD" || name == "nod") return Mechanism::kNod;
  if (name == "NOR" || name == "nor") return Mechanism::kNor;
  if (name == "LRM" || name == "lrm") return Mechanism::kLrm;
  if (name == "AMM" || name == "amm") return Mechanism::kAmm;
  throw std::invalid_argument("unknown mechanism '" + name + "'");
}

Decomposition::Decomposition(Matrix b_in, Matrix l_in, const Matrix& w)
    : b(std::move(b_in)), l(std::move(l_in)), residual(0.0), max_col_l1(0.0) {
  if (b.cols() != l.rows() || b.cols() < 1) {
    throw std::invalid_argument("Decomposition: b is " + std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + " but l is " +
                                std::to_string(l.rows()) + "x" + std::to_string(l.cols()));
  }
  if (w.rows() != b.rows() || w.cols() != l.cols()) {
    throw std::invalid_argument("Decomposition: w shape does not match b*l");
  }
  residual = frobenius_norm(w - b * l);
  max_col_l1 = max_column_abs_sum(l);
}

void Decomposition::validate(const Matrix& w) const {
  const double res = frobenius_norm(w - b * l);
  const double col = max_column_abs_sum(l);
  if (std::abs(res - residual) > 1e-10 * std::max(1.0, residual)) {
    throw std::runtime_error("Decomposition: stored residual " + std::to_string(residual) +
                             " != recomputed " + std::to_string(res));
  }
  if (std::abs(col - max_col_l1) > 1e-10 * std::max(1.0, max_col_l1)) {
    throw std::runtime_error("Decomposition: stored max_col_l1 " + std::to_string(max_col_l1) +
                             " != recomputed " + std::to_string(col));
  }
}

std::vector<double> sample_laplace(double scale, int count, std::uint64_t seed) {
  if (!(scale > 0.0)) {
    throw std::invalid_argument("sample_laplace: scale must be > 0");
  }
  if (count < 0) {
    throw std::invalid_argument("sample_laplace: negative count");
  }
  SplitMix64 rng(seed);
  std::vector<double> draws(count);
  for (int i = 0; i < count; ++i) draws[i] = rng.next_laplace(scale);
  return draws;
}

double query_scale(const Matrix& b) {
  double acc = 0.0;
  const double* p = b.data();
  for (std::size_t i = 0; i < b.size(); ++i) acc += p[i] * p[i];
  return acc;
}

double query_sensitivity(const Matrix& l) { return max_column_abs_sum(l); }

NoisyAnswer answer_nod(const Matrix& w, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed) {
  require_counts_match(w.cols(), d, "answer_nod");
  const double scale = Dataset::kUnitSensitivity / eps.epsilon;
  std::vector<double> noisy = d.counts;
  SplitMix64 rng(seed);
  for (double& v : noisy) v += rng.next_laplace(scale);
  return {mat_vec(w, noisy), Mechanism::kNod, seed};
}

NoisyAnswer answer_nor(const Matrix& w, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed) {
  require_counts_match(w.cols(), d, "answer_nor");
  std::vector<double> exact = mat_vec(w, d.counts);
  const double delta = max_column_abs_sum(w);
  if (delta == 0.0) {
    std::cerr << "[lrmech] warning: answer_nor called with an all-zero workload; "
                 "sensitivity 0, returning exact answers without noise\n";
    return {std::move(exact), Mechanism::kNor, seed};
  }
  const double scale = delta / eps.epsilon;
  SplitMix64 rng(seed);
  for (double& v : exact) v += rng.next_laplace(scale);
  return {std::move(exact), Mechanism::kNor, seed};
}

NoisyAnswer answer_lrm(const Decomposition& dec, const Dataset& d, const PrivacyBudget& eps,
                       std::uint64_t seed) {
  require_counts_match(dec.l.cols(), d, "answer_lrm");
  std::vector<double> mid = mat_vec(dec.l, d.counts);
  const double delta = dec.max_col_l1;
  if (delta == 0.0) {
    std::cerr << "[lrmech] warning: answer_lrm called with L = 0; sensitivity 0, "
                 "returning exact (all-zero workload) answers without noise\n";
    return {mat_vec(dec.b, mid), Mechanism::kLrm, seed};
  }
  const double scale = delta / eps.epsilon;
  SplitMix64 rng(seed);
  for (double& v : mid) v += rng.next_laplace(scale);
  return {mat_vec(dec.b, mid), Mechanism::kLrm, seed};
}

double expected_error_nod(const Matrix& w, const PrivacyBudget& eps) {
  const double delta = Dataset::kUnitSensitivity;
  return 2.0 * delta * delta * query_scale(w) / (eps.epsilon * eps.epsilon);
}

double expected_error_nor(const Matrix& w, const PrivacyBudget& eps) {
  const double delta = max_column_abs_sum(w);
  return 2.0 * w.rows() * delta * delta / (eps.epsilon * eps.epsilon);
}

double expected_error_lrm(const Decomposition& dec, const PrivacyBudget& eps) {
  const double delta = dec.max_col_l1;
  return 2.0 * query_scale(dec.b) * delta * delta / (eps.epsilon * eps.epsilon);
}

double expected_error_lrm_relaxed(const Decomposition& dec, const PrivacyBudget& eps,
                                  const Dataset& d) {
  d.validate();
  double sum_sq = 0.0;
  for (double x : d.counts) sum_sq += x * x;
  const double eps2 = eps.epsilon * eps.epsilon;
  double tr = 0.0;
  const double* p = dec.b.data();
  for (std::size_t i = 0; i < dec.b.size(); ++i) tr += p[i] * p[i];  // tr(B^T B)
  return 2.0 * tr / eps2 + dec.residual * sum_sq;
}

}  // namespace lrmech
