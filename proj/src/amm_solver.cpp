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

#include "lrmech/amm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrmech/linalg.hpp"

namespace lrmech {

namespace {

// M = sum_k f(lambda_k) v_k v_k^T for the eigenpairs in `eig`, built
// symmetric by construction (upper triangle computed, then mirrored).
Matrix rebuild_from_eig(const SymEigResult& eig,
                        const std::vector<double>& lambdas) {
  const int n = eig.vectors.rows();
  Matrix out(n, n);
  for (int k = 0; k < n; ++k) {
    const double lk = lambdas[static_cast<std::size_t>(k)];
    if (lk == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      const double vik = eig.vectors(i, k) * lk;
      if (vik == 0.0) continue;
      for (int j = i; j < n; ++j) {
        out(i, j) += vik * eig.vectors(j, k);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      out(i, j) = out(j, i);
    }
  }
  return out;
}

std::vector<double> diagonal(const Matrix& m) {
  std::vector<double> d(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    d[static_cast<std::size_t>(i)] = m(i, i);
  }
  return d;
}

// Smoothed objective given the precomputed Gram matrix K = W^T W.
double objective_with_gram(const Matrix& m, const Matrix& k, double mu,
                           Matrix* gradient) {
  const int n = m.rows();
  const Matrix minv = solve_spd(m, Matrix::identity(n));
  const double trace_term = dot(k, minv);
  const std::vector<double> diag = diagonal(m);
  const double f_val = smoothed_max(diag, mu);
  if (gradient != nullptr) {
    // Product rule: the soft-max weights land on the diagonal, the trace
    // factor contributes -M^{-1} K M^{-1}. Symmetrize to shed the last
    // bits of round-off from the two solves.
    const std::vector<double> soft = smoothed_max_grad(diag, mu);
    Matrix g = minv * k * minv;
    g *= -f_val;
    for (int i = 0; i < n; ++i) {
      g(i, i) += trace_term * soft[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < i; ++j) {
        const double avg = 0.5 * (g(i, j) + g(j, i));
        g(i, j) = avg;
        g(j, i) = avg;
      }
    }
    *gradient = std::move(g);
  }
  return f_val * trace_term;
}

}  // namespace

void AmmConfig::validate() const {
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::invalid_argument("AmmConfig: mu must be >= 0 (0 = default)");
  }
  if (!std::isfinite(eig_floor) || eig_floor < 0.0) {
    throw std::invalid_argument("AmmConfig: eig_floor must be >= 0 (0 = default)");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("AmmConfig: max_iters must be >= 1");
  }
  if (nonmonotone_memory < 1) {
    throw std::invalid_argument("AmmConfig: nonmonotone_memory must be >= 1");
  }
  if (!std::isfinite(alpha_min) || !std::isfinite(alpha_max) || alpha_min <= 0.0 ||
      alpha_max < alpha_min) {
    throw std::invalid_argument("AmmConfig: need 0 < alpha_min <= alpha_max");
  }
  if (!std::isfinite(c1) || c1 <= 0.0 || c1 >= 1.0) {
    throw std::invalid_argument("AmmConfig: c1 must lie in (0, 1)");
  }
}

double smoothed_max(const std::vector<double>& v, double mu) {
  if (v.empty()) {
    throw std::invalid_argument("smoothed_max: empty vector");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("smoothed_max: mu must be positive");
  }
  const double top = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) {
    sum += std::exp((x - top) / mu);
  }
  return top + mu * std::log(sum);
}

std::vector<double> smoothed_max_grad(const std::vector<double>& v, double mu) {
  if (v.empty()) {
    throw std::invalid_argument("smoothed_max_grad: empty vector");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument("smoothed_max_grad: mu must be positive");
  }
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> g(v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    g[i] = std::exp((v[i] - top) / mu);
    sum += g[i];
  }
  for (double& x : g) {
    x /= sum;
  }
  return g;
}

double amm_objective(const Matrix& m, const Matrix& w, double mu, Matrix* gradient) {
  if (m.empty() || m.rows() != m.cols()) {
    throw std::invalid_argument("amm_objective: M must be square and non-empty");
  }
  if (w.cols() != m.rows()) {
    throw std::invalid_argument("amm_objective: W has " + std::to_string(w.cols()) +
                                " columns but M is " + std::to_string(m.rows()) + " x " +
                                std::to_string(m.rows()));
  }
  const Matrix k = transpose(w) * w;
  return objective_with_gram(m, k, mu, gradient);
}

Matrix project_cone(const Matrix& x, double eig_floor, double* min_eig_out) {
  if (x.empty() || x.rows() != x.cols()) {
    throw std::invalid_argument("project_cone: matrix must be square and non-empty");
  }
  if (!(eig_floor > 0.0) || !std::isfinite(eig_floor)) {
    throw std::invalid_argument("project_cone: eig_floor must be positive");
  }
  const int n = x.rows();
  Matrix sym(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sym(i, j) = 0.5 * (x(i, j) + x(j, i));
    }
  }
  const SymEigResult eig = sym_eig(sym);
  std::vector<double> clipped(eig.values);
  bool any_clip = false;
  for (double& lam : clipped) {
    if (lam < eig_floor) {
      lam = eig_floor;
      any_clip = true;
    }
  }
  if (min_eig_out != nullptr) {
    // Eigenvalues are sorted descending, so the smallest sits at the back.
    *min_eig_out = any_clip ? eig_floor : clipped.back();
  }
  return rebuild_from_eig(eig, clipped);
}

AmmSolution amm_solve(const Matrix& w, const AmmConfig& cfg) {
  cfg.validate();
  if (w.empty()) {
    throw std::invalid_argument("amm_solve: empty workload");
  }
  if (!w.all_finite()) {
    throw std::invalid_argument("amm_solve: workload has non-finite entries");
  }
  const int n = w.cols();
  if (svd(w).rank < n) {
    throw std::invalid_argument(
        "amm_solve: the workload is rank-deficient over its " + std::to_string(n) +
        " columns; the strategy needs full column rank. Reduce the domain "
        "(merge_domain) or regularize the workload before solving.");
  }

  const double mu =
      cfg.mu > 0.0 ? cfg.mu : 1e-2 / std::log(static_cast<double>(std::max(n, 2)));
  const Matrix k = transpose(w) * w;

  // Fix the floor once from the initial iterate so the feasible set does not
  // drift as the scale of M changes.
  Matrix m = Matrix::identity(n);
  const double eig_floor =
      cfg.eig_floor > 0.0 ? cfg.eig_floor : 1e-8 * trace(m) / static_cast<double>(n);

  AmmSolution sol;
  sol.mu = mu;
  sol.eig_floor = eig_floor;
  sol.seed = cfg.seed;

  double init_min_eig = 0.0;
  m = project_cone(m, eig_floor, &init_min_eig);

  Matrix grad;
  double f_cur = objective_with_gram(m, k, mu, &grad);
  sol.trace.objectives.push_back(f_cur);
  sol.trace.min_eigenvalues.push_back(init_min_eig);

  Matrix best_m = m;
  double best_f = f_cur;

  std::deque<double> history;
  history.push_back(f_cur);

  const double g0_norm = frobenius_norm(grad);
  std::string termination = "iteration-limit";
  int iterations = 0;

  if (g0_norm == 0.0) {
    termination = "converged";
  } else {
    double alpha = std::clamp(1.0 / g0_norm, cfg.alpha_min, cfg.alpha_max);
    for (int it = 1; it <= cfg.max_iters; ++it) {
      iterations = it;
      const double ref = *std::max_element(history.begin(), history.end());
      const double gg = dot(grad, grad);

      // Backtracking under the non-monotone sufficient-decrease test,
      // halving the step until it passes or collapses.
      double alpha_try = alpha;
      Matrix candidate;
      double cand_min_eig = 0.0;
      double f_cand = 0.0;
      Matrix grad_cand;
      bool accepted = false;
      while (alpha_try >= cfg.alpha_min) {
        candidate = m + (-alpha_try) * grad;
        candidate = project_cone(candidate, eig_floor, &cand_min_eig);
        f_cand = objective_with_gram(candidate, k, mu, &grad_cand);
        if (f_cand <= ref - cfg.c1 * alpha_try * gg) {
          accepted = true;
          break;
        }
        alpha_try *= 0.5;
      }
      if (!accepted) {
        termination = "step-collapse";
        break;
      }

      Matrix step = candidate;
      step -= m;
      const double step_norm = frobenius_norm(step);

      // Barzilai-Borwein step length for the next iterate, clamped.
      Matrix dg = grad_cand;
      dg -= grad;
      const double sy = dot(step, dg);
      if (sy > 0.0) {
        alpha = std::clamp(dot(step, step) / sy, cfg.alpha_min, cfg.alpha_max);
      } else {
        alpha = cfg.alpha_max;
      }

      m = std::move(candidate);
      grad = std::move(grad_cand);
      f_cur = f_cand;
      sol.trace.objectives.push_back(f_cur);
      sol.trace.min_eigenvalues.push_back(cand_min_eig);
      history.push_back(f_cur);
      while (static_cast<int>(history.size()) > cfg.nonmonotone_memory) {
        history.pop_front();
      }
      if (f_cur < best_f) {
        best_f = f_cur;
        best_m = m;
      }
      if (step_norm <= 1e-10 * std::max(1.0, frobenius_norm(m))) {
        termination = "converged";
        break;
      }
    }
  }

  sol.trace.iterations = iterations;
  sol.trace.termination = termination;

  // Extract the strategy from the best iterate: clip its spectrum one more
  // time and take the matching square root, so strategy^T strategy matches
  // m_matrix by construction.
  const SymEigResult eig = sym_eig(best_m);
  std::vector<double> lam(eig.values);
  for (double& x : lam) {
    x = std::max(x, eig_floor);
  }
  std::vector<double> root(lam);
  for (double& x : root) {
    x = std::sqrt(x);
  }
  sol.m_matrix = rebuild_from_eig(eig, lam);
  sol.strategy = rebuild_from_eig(eig, root);
  sol.smoothed_objective = objective_with_gram(sol.m_matrix, k, mu, nullptr);

  // Exact objective: the largest diagonal entry replaces its smooth stand-in.
  const std::vector<double> diag = diagonal(sol.m_matrix);
  const double exact_max = *std::max_element(diag.begin(), diag.end());
  const Matrix minv = solve_spd(sol.m_matrix, Matrix::identity(n));
  sol.objective = exact_max * dot(k, minv);
  return sol;
}

NoisyAnswer answer_amm(const AmmSolution& sol, const Matrix& w, const Dataset& d,
                       const PrivacyBudget& eps, std::uint64_t seed) {
  const int n = w.cols();
  if (sol.strategy.rows() != n || sol.strategy.cols() != n) {
    throw std::invalid_argument("answer_amm: strategy shape does not match the workload");
  }
  if (d.n() != n) {
    throw std::invalid_argument("answer_amm: dataset has " + std::to_string(d.n()) +
                                " counts, workload expects " + std::to_string(n));
  }
  d.validate();

  const SvdResult sv = svd(sol.strategy);
  if (sv.rank < n) {
    throw std::invalid_argument(
        "answer_amm: strategy is rank-deficient; re-solve with a positive "
        "eigenvalue floor");
  }
  // Pseudo-inverse from the factorization we already have.
  Matrix pinv(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double sum = 0.0;
      for (int t = 0; t < sv.rank; ++t) {
        sum += sv.v(t, i) * sv.u(j, t) / sv.sigma[static_cast<std::size_t>(t)];
      }
      pinv(i, j) = sum;
    }
  }

  const double delta = query_sensitivity(sol.strategy);
  std::vector<double> y = mat_vec(sol.strategy, d.counts);
  const std::vector<double> noise =
      sample_laplace(delta * Dataset::kUnitSensitivity / eps.epsilon, n, seed);
  for (int i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] += noise[static_cast<std::size_t>(i)];
  }

  const std::vector<double> recovered = mat_vec(pinv, y);
  NoisyAnswer out;
  out.values = mat_vec(w, recovered);
  out.tag = Mechanism::kAmm;
  out.seed = seed;
  return out;
}

void save_amm_solution(const std::string& dir, const AmmSolution& sol) {
  std::filesystem::create_directories(dir);
  save_matrix(dir + "/M.mat", sol.m_matrix);
  save_matrix(dir + "/A.mat", sol.strategy);
  std::ofstream meta(dir + "/meta");
  if (!meta) {
    throw std::runtime_error("save_amm_solution: cannot write '" + dir + "/meta'");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", sol.mu);
  meta << "mu = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", sol.eig_floor);
  meta << "eig_floor = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", sol.objective);
  meta << "objective = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", sol.smoothed_objective);
  meta << "smoothed_objective = " << buf << "\n";
  meta << "iterations = " << sol.trace.iterations << "\n";
  meta << "seed = " << sol.seed << "\n";
  meta << "termination = " << sol.trace.termination << "\n";
  if (!meta) {
    throw std::runtime_error("save_amm_solution: write to '" + dir + "/meta' failed");
  }
}

AmmSolution load_amm_solution(const std::string& dir) {
  Matrix m = load_matrix(dir + "/M.mat");
  Matrix a = load_matrix(dir + "/A.mat");

  std::ifstream in(dir + "/meta");
  if (!in) {
    throw std::runtime_error("load_amm_solution: cannot open '" + dir + "/meta'");
  }
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("load_amm_solution: '" + dir + "/meta' line " +
                               std::to_string(line_no) + ": expected 'key = value'");
    }
    auto strip = [](std::string s) {
      const std::size_t a2 = s.find_first_not_of(" \t\r");
      const std::size_t z = s.find_last_not_of(" \t\r");
      return a2 == std::string::npos ? std::string() : s.substr(a2, z - a2 + 1);
    };
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::runtime_error("load_amm_solution: '" + dir + "/meta' missing key '" + key +
                               "'");
    }
    return it->second;
  };

  AmmSolution sol;
  sol.mu = std::stod(need("mu"));
  sol.eig_floor = std::stod(need("eig_floor"));
  sol.objective = std::stod(need("objective"));
  sol.smoothed_objective = std::stod(need("smoothed_objective"));
  sol.trace.iterations = std::stoi(need("iterations"));
  sol.seed = std::stoull(need("seed"));
  sol.trace.termination = need("termination");

  if (m.rows() != m.cols() || a.rows() != m.rows() || a.cols() != m.cols()) {
    throw std::runtime_error("load_amm_solution: M.mat and A.mat must be square and "
                             "of matching size");
  }
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(m(i, j) - m(j, i)) >
          1e-10 * std::max({1.0, std::abs(m(i, j)), std::abs(m(j, i))})) {
        throw std::runtime_error("load_amm_solution: M.mat is not symmetric");
      }
    }
  }
  const Matrix gram = transpose(a) * a;
  Matrix diff = gram;
  diff -= m;
  if (frobenius_norm(diff) > 1e-6 * std::max(1.0, frobenius_norm(m))) {
    throw std::runtime_error(
        "load_amm_solution: A.mat is not a square root of M.mat (corrupted or "
        "mismatched files?)");
  }
  sol.m_matrix = std::move(m);
  sol.strategy = std::move(a);
  return sol;
}

}  // namespace lrmech
