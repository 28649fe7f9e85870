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

// End-to-end acceptance suite. Each criterion prints exactly one line,
// "PASS criterion N: ..." or "FAIL criterion N: ...", and the process exits
// with the number of failures. Unlike the unit suites, these checks exercise
// whole pipelines (solver feasibility across an instance family, Monte Carlo
// calibration against closed forms, oracle equivalence, CLI determinism) and
// carry the tolerances that define "working" for this library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lrmech/amm_solver.hpp"
#include "lrmech/bench.hpp"
#include "lrmech/linalg.hpp"
#include "lrmech/lrm_solver.hpp"
#include "lrmech/matrix.hpp"
#include "lrmech/mechanisms.hpp"
#include "lrmech/rng.hpp"
#include "lrmech/workload.hpp"

using namespace lrmech;

namespace {

int g_failures = 0;

void report(int id, bool ok, const std::string& label, const std::string& detail) {
  if (ok) {
    std::printf("PASS criterion %d: %s%s%s\n", id, label.c_str(), detail.empty() ? "" : " - ",
                detail.c_str());
  } else {
    std::printf("FAIL criterion %d: %s%s%s\n", id, label.c_str(), detail.empty() ? "" : " - ",
                detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix random_matrix(int m, int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = rng.next_normal();
  }
  return a;
}

Matrix random_low_rank(int m, int n, int rank, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Matrix a(m, rank), c(rank, n);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < rank; ++k) a(i, k) = rng.next_normal();
  }
  for (int k = 0; k < rank; ++k) {
    for (int j = 0; j < n; ++j) c(k, j) = rng.next_normal();
  }
  return a * c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// Shared output of the solver-feasibility run, reused by the bound and
// convergence-trend criteria.
struct SolvedInstance {
  Matrix w;
  Decomposition dec{Matrix(1, 1), Matrix(1, 1), Matrix(1, 1)};
  SolveTrace trace;
  bool ok = false;
};

// ---------------------------------------------------------------------------

void criterion_1_laplace_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (double scale : {0.5, 1.0, 5.0}) {
    const std::vector<double> draws =
        sample_laplace(scale, 1000000, derive_seed(2026, static_cast<std::uint64_t>(scale * 10)));
    double sum = 0.0, sum_sq = 0.0;
    for (double x : draws) {
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / draws.size();
    const double var = sum_sq / draws.size() - mean * mean;
    const double want = 2.0 * scale * scale;
    if (std::abs(var - want) > 0.03 * want) {
      ok = false;
      detail = "scale " + fmt(scale) + ": variance " + fmt(var) + " vs " + fmt(want);
      break;
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 5.0) {
    ok = false;
    detail = "took " + fmt(secs) + " s (budget 5 s)";
  }
  report(1, ok, "noise variance calibrated to 2 s^2 across scales",
         ok ? fmt(secs) + " s" : detail);
}

void criterion_2_factored_error_monte_carlo() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  const PrivacyBudget eps(1.0);
  for (int inst = 0; inst < 5 && ok; ++inst) {
    const int m = 3 + inst;       // 3..7
    const int r = 1 + inst % 4;   // 1..4
    const int n = 8 - inst;       // 8..4
    const Matrix b = random_matrix(m, r, 300 + inst);
    const Matrix l = project_columns_l1(random_matrix(r, n, 600 + inst), 1.0);
    const Matrix w = b * l;
    const Decomposition dec(b, l, w);

    Dataset d;
    d.counts.resize(n);
    SplitMix64 counts_rng(900 + inst);
    for (double& c : d.counts) c = 10.0 * counts_rng.next_unit_open();

    const std::vector<double> exact = mat_vec(w, d.counts);
    const int trials = 200000;
    double total = 0.0;
    const std::uint64_t base = derive_seed(4000, inst);
    for (int t = 0; t < trials; ++t) {
      const NoisyAnswer ans = answer_lrm(dec, d, eps, derive_seed(base, t));
      for (std::size_t i = 0; i < exact.size(); ++i) {
        const double diff = ans.values[i] - exact[i];
        total += diff * diff;
      }
    }
    const double mc = total / trials;
    const double want = expected_error_lrm(dec, eps);
    if (std::abs(mc - want) > 0.03 * want) {
      ok = false;
      detail = "instance " + std::to_string(inst) + ": Monte Carlo " + fmt(mc) +
               " vs closed form " + fmt(want);
    }
  }
  const double secs = seconds_since(t0);
  if (ok && secs >= 30.0) {
    ok = false;
    detail = "took " + fmt(secs) + " s (budget 30 s)";
  }
  report(2, ok, "factored-mechanism error matches its closed form in Monte Carlo",
         ok ? fmt(secs) + " s" : detail);
}

void criterion_3_scale_invariance() {
  bool ok = true;
  std::string detail;
  SplitMix64 shapes(55);
  for (int inst = 0; inst < 100 && ok; ++inst) {
    const int m = 2 + shapes.next_int_1_to_n(6);
    const int r = shapes.next_int_1_to_n(4);
    const int n = 2 + shapes.next_int_1_to_n(6);
    const Matrix b = random_matrix(m, r, 1100 + inst);
    const Matrix l = random_matrix(r, n, 2100 + inst);
    const double base = query_scale(b) * query_sensitivity(l) * query_sensitivity(l);
    for (double alpha : {1e-3, 1.0, 1e3}) {
      Matrix ba = b;
      ba *= alpha;
      Matrix la = l;
      la *= 1.0 / alpha;
      const double scaled = query_scale(ba) * query_sensitivity(la) * query_sensitivity(la);
      if (std::abs(scaled - base) > 1e-10 * std::max(1.0, std::abs(base))) {
        ok = false;
        detail = "alpha " + fmt(alpha) + ": " + fmt(scaled) + " vs " + fmt(base);
        break;
      }
    }
  }
  report(3, ok, "noise amplitude is invariant under factor rescaling", detail);
}

std::vector<SolvedInstance> criterion_4_solver_feasibility() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SolvedInstance> solved(20);
  bool ok = true;
  std::string detail;
  for (int inst = 0; inst < 20; ++inst) {
    SolvedInstance& si = solved[inst];
    si.w = random_low_rank(32, 64, 8, 1000 + inst);
    SolverConfig cfg;
    cfg.gamma = 1e-4;
    auto [dec, trace] = decompose(si.w, cfg);
    si.dec = std::move(dec);
    si.trace = std::move(trace);
    const double target = 1e-4 * frobenius_norm(si.w);
    si.ok = si.dec.max_col_l1 <= 1.0 + 1e-9 && si.dec.residual <= target &&
            static_cast<int>(si.trace.outer.size()) <= 200;
    if (!si.ok && ok) {
      ok = false;
      detail = "instance " + std::to_string(inst) + ": residual " + fmt(si.dec.residual) +
               " vs target " + fmt(target) + " after " +
               std::to_string(si.trace.outer.size()) + " outers (" + si.trace.termination +
               ")";
    }
  }
  const double secs = seconds_since(t0);
  if (ok && secs >= 120.0) {
    ok = false;
    detail = "took " + fmt(secs) + " s (budget 120 s)";
  }
  report(4, ok, "solver reaches feasibility on all 20 random low-rank workloads",
         ok ? fmt(secs) + " s" : detail);
  return solved;
}

void criterion_5_trace_bound(const std::vector<SolvedInstance>& solved) {
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < solved.size() && ok; ++i) {
    const SolvedInstance& si = solved[i];
    const SvdResult spec = svd(si.w);
    double sum_sq = 0.0;
    for (int k = 0; k < spec.rank; ++k) sum_sq += spec.sigma[k] * spec.sigma[k];
    const double bound = si.dec.r() * sum_sq;
    const double got = dot(si.dec.b, si.dec.b);
    if (!(got <= bound * (1.0 + 1e-9))) {
      ok = false;
      detail = "instance " + std::to_string(i) + ": tr(B^T B) = " + fmt(got) +
               " exceeds r * sum lambda^2 = " + fmt(bound);
    }
  }
  report(5, ok, "returned factor energy stays under the spectral bound", detail);
}

void criterion_6_low_rank_dominance() {
  const auto t0 = std::chrono::steady_clock::now();
  const PrivacyBudget eps(1.0);
  int within = 0;
  double best_ratio = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    WorkloadSpec spec;
    spec.family = WorkloadFamily::kWRelated;
    spec.m = 64;
    spec.n = 128;
    spec.s = 13;
    spec.seed = seed;
    const Matrix w = generate_workload(spec);

    SolverConfig cfg;  // defaults: gamma 0.01 (relative), automatic rank
    const auto [dec, trace] = decompose(w, cfg);

    const double lrm = expected_error_lrm(dec, eps);
    const double baseline = std::min(expected_error_nod(w, eps), expected_error_nor(w, eps));
    const double ratio = lrm / baseline;
    best_ratio = std::min(best_ratio, ratio);
    worst_ratio = std::max(worst_ratio, ratio);
    if (lrm <= 0.5 * baseline) ++within;
  }
  const bool ok = within == 10;
  report(6, ok, "factored mechanism beats both baselines twofold on low-rank workloads",
         std::to_string(within) + "/10 seeds at or below 0.5x, ratios " + fmt(best_ratio) +
             ".." + fmt(worst_ratio) + ", " + fmt(seconds_since(t0)) + " s");
}

void criterion_7_epsilon_scaling() {
  // The factored answers carry a deterministic approximation bias alongside
  // the calibrated noise, and only the noise scales with epsilon. A fixed
  // low-rank instance solved to a tight tolerance with modest counts keeps
  // that bias far below the noise floor, so the measured ratios isolate the
  // 1/eps^2 law.
  ExperimentPlan plan;
  plan.family = WorkloadFamily::kWRelated;
  plan.m = 16;
  plan.n = 32;
  plan.s = 4;
  plan.gamma = 1e-7;
  plan.dataset_mu = 0.0;
  plan.dataset_sigma = 1.0;
  plan.mechanisms = {Mechanism::kLrm};
  plan.sweep = "epsilon";
  plan.sweep_values = {1.0, 0.1, 0.01};
  plan.repetitions = 20;

  bool ok = true;
  std::string detail;
  try {
    const std::vector<ResultRow> rows = run_plan(plan);
    // Rows come back sorted by sweep value: 0.01, 0.1, 1.0.
    if (rows.size() != 3) {
      ok = false;
      detail = "expected 3 rows, got " + std::to_string(rows.size());
    } else {
      const double r1 = rows[1].mse / rows[2].mse;  // 0.1 vs 1.0
      const double r2 = rows[0].mse / rows[1].mse;  // 0.01 vs 0.1
      ok = r1 >= 90.0 && r1 <= 110.0 && r2 >= 90.0 && r2 <= 110.0;
      detail = "per-decade ratios " + fmt(r1) + ", " + fmt(r2);
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report(7, ok, "measured error grows 100x per privacy decade", detail);
}

void criterion_8_projection_oracle() {
  bool ok = true;
  std::string detail;

  // Exhaustive-within-resolution oracle for 3-vectors: enumerate the first
  // two coordinates on a 1e-3 grid over the ball, solve the third exactly
  // (clamping onto the leftover radius is the true conditional optimum).
  SplitMix64 rng(8008);
  const double step = 1e-3;
  for (int rep = 0; rep < 50 && ok; ++rep) {
    std::vector<double> v(3);
    for (double& x : v) x = 1.2 * rng.next_normal();

    double best_dist = 1e300;
    double best[3] = {0, 0, 0};
    for (int i1 = -1000; i1 <= 1000; ++i1) {
      const double u1 = i1 * step;
      const int cap2 = 1000 - std::abs(i1);
      const double d1 = (v[0] - u1) * (v[0] - u1);
      if (d1 >= best_dist) continue;
      for (int i2 = -cap2; i2 <= cap2; ++i2) {
        const double u2 = i2 * step;
        const double rem = 1.0 - std::abs(u1) - std::abs(u2);
        const double u3 = std::clamp(v[2], -rem, rem);
        const double dist = d1 + (v[1] - u2) * (v[1] - u2) + (v[2] - u3) * (v[2] - u3);
        if (dist < best_dist) {
          best_dist = dist;
          best[0] = u1;
          best[1] = u2;
          best[2] = u3;
        }
      }
    }

    const std::vector<double> got = project_l1_ball(v, 1.0);
    for (int i = 0; i < 3; ++i) {
      if (std::abs(got[i] - best[i]) > 2e-3) {
        ok = false;
        detail = "vector " + std::to_string(rep) + " coordinate " + std::to_string(i) + ": " +
                 fmt(got[i]) + " vs oracle " + fmt(best[i]);
        break;
      }
    }
  }

  // Feasibility and bitwise idempotence at scale.
  for (int rep = 0; rep < 1000 && ok; ++rep) {
    std::vector<double> v(50);
    for (double& x : v) x = 2.0 * rng.next_normal();
    const std::vector<double> once = project_l1_ball(v, 1.0);
    double l1 = 0.0;
    for (double x : once) l1 += std::abs(x);
    if (l1 > 1.0) {
      ok = false;
      detail = "projection left the ball: L1 = " + fmt(l1);
      break;
    }
    if (project_l1_ball(once, 1.0) != once) {
      ok = false;
      detail = "projection is not idempotent on vector " + std::to_string(rep);
      break;
    }
  }
  report(8, ok, "ball projection matches the grid oracle and is exactly idempotent", detail);
}

void criterion_9_subsolver_equivalence() {
  bool ok = true;
  std::string detail;
  for (int inst = 0; inst < 5 && ok; ++inst) {
    const int m = 4 + inst % 3;
    const int r = 2 + inst % 5;  // 2..6
    const int n = 3 + inst % 4;  // 3..6
    const Matrix b = random_matrix(m, r, 7000 + inst);
    const Matrix w = random_matrix(m, n, 7100 + inst);
    const Matrix pi = random_matrix(m, n, 7200 + inst);
    const double beta = 4.0;
    const Matrix l0 = project_columns_l1(random_matrix(r, n, 7300 + inst), 1.0);

    SolverConfig cfg;
    cfg.r = r;
    const NesterovResult accel = nesterov_solve_l(b, w, pi, beta, l0, cfg);
    const double g_accel = inner_objective_l(accel.l, b, w, pi, beta);

    // Naive oracle: plain projected gradient with the exact Lipschitz step,
    // run to exhaustion.
    const Matrix h = transpose(b) * b;
    const SymEigResult eig = sym_eig(h);
    const double lips = beta * std::max(eig.values.front(), 1e-12);
    Matrix l = l0;
    for (int it = 0; it < 1000000; ++it) {
      Matrix grad;
      inner_objective_l(l, b, w, pi, beta, &grad);
      l = project_columns_l1(l - (1.0 / lips) * grad, 1.0);
    }
    const double g_oracle = inner_objective_l(l, b, w, pi, beta);

    if (std::abs(g_accel - g_oracle) > 1e-6 * std::max(1.0, std::abs(g_oracle))) {
      ok = false;
      detail = "instance " + std::to_string(inst) + ": " + fmt(g_accel) + " vs oracle " +
               fmt(g_oracle);
    }
  }
  report(9, ok, "accelerated subsolver agrees with a long-run gradient oracle", detail);
}

void criterion_10_gradient_checks() {
  bool ok = true;
  std::string detail;
  const double h = 1e-6;
  const double tol = 1e-5;

  // Gradient of the L subproblem.
  for (int inst = 0; inst < 10 && ok; ++inst) {
    const Matrix w = random_matrix(5, 6, 10000 + inst);
    const Matrix b = random_matrix(5, 3, 10100 + inst);
    const Matrix l = random_matrix(3, 6, 10200 + inst);
    const Matrix pi = random_matrix(5, 6, 10300 + inst);
    const double beta = 2.5;
    Matrix grad;
    inner_objective_l(l, b, w, pi, beta, &grad);
    for (int probe = 0; probe < 4 && ok; ++probe) {
      const int i = probe % 3;
      const int j = (probe * 2 + inst) % 6;
      Matrix lp = l, lm = l;
      lp(i, j) += h;
      lm(i, j) -= h;
      const double fd =
          (inner_objective_l(lp, b, w, pi, beta) - inner_objective_l(lm, b, w, pi, beta)) /
          (2.0 * h);
      if (std::abs(fd - grad(i, j)) > tol * std::max(1.0, std::abs(grad(i, j)))) {
        ok = false;
        detail = "subproblem gradient: " + fmt(grad(i, j)) + " vs " + fmt(fd);
      }
    }
  }

  // Stationarity of the closed-form B update.
  for (int inst = 0; inst < 10 && ok; ++inst) {
    const Matrix w = random_matrix(6, 8, 11000 + inst);
    const Matrix l = project_columns_l1(random_matrix(4, 8, 11100 + inst), 1.0);
    const Matrix pi = random_matrix(6, 8, 11200 + inst);
    const double beta = 3.0;
    const Matrix b = update_b(l, w, pi, beta);
    const Matrix residual = b + beta * (b * l - w) * transpose(l) - pi * transpose(l);
    if (frobenius_norm(residual) > tol * std::max(1.0, frobenius_norm(b))) {
      ok = false;
      detail = "B update stationarity residual " + fmt(frobenius_norm(residual));
    }
  }

  // Soft-max gradient.
  SplitMix64 rng(12000);
  for (int inst = 0; inst < 10 && ok; ++inst) {
    std::vector<double> v(6);
    for (double& x : v) x = 3.0 * rng.next_normal();
    const double mu = 0.05 + 0.3 * rng.next_unit_open();
    const std::vector<double> g = smoothed_max_grad(v, mu);
    for (std::size_t i = 0; i < v.size() && ok; ++i) {
      std::vector<double> vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      const double fd = (smoothed_max(vp, mu) - smoothed_max(vm, mu)) / (2.0 * h);
      if (std::abs(fd - g[i]) > tol * std::max(1.0, std::abs(g[i]))) {
        ok = false;
        detail = "soft-max gradient: " + fmt(g[i]) + " vs " + fmt(fd);
      }
    }
  }

  // Strategy-objective gradient, probed along symmetric directions.
  for (int inst = 0; inst < 10 && ok; ++inst) {
    const int n = 4;
    const Matrix w = random_matrix(7, n, 13000 + inst);
    const Matrix p = random_matrix(n, n, 13100 + inst);
    const Matrix m = Matrix::identity(n) + 0.1 * (p + transpose(p));
    const double mu = 0.05;
    Matrix grad;
    amm_objective(m, w, mu, &grad);
    for (int probe = 0; probe < 4 && ok; ++probe) {
      const int i = probe % n;
      const int j = (probe + inst) % n;
      Matrix mp = m, mm = m;
      mp(i, j) += h;
      mm(i, j) -= h;
      if (i != j) {
        mp(j, i) += h;
        mm(j, i) -= h;
      }
      const double fd = (amm_objective(mp, w, mu) - amm_objective(mm, w, mu)) / (2.0 * h);
      const double analytic = i == j ? grad(i, i) : grad(i, j) + grad(j, i);
      if (std::abs(fd - analytic) > tol * std::max(1.0, std::abs(analytic))) {
        ok = false;
        detail = "strategy-objective gradient: " + fmt(analytic) + " vs " + fmt(fd);
      }
    }
  }

  report(10, ok, "all four analytic gradients match central differences", detail);
}

void criterion_11_softmax_sandwich() {
  bool ok = true;
  std::string detail;
  SplitMix64 rng(14000);
  for (int rep = 0; rep < 1000 && ok; ++rep) {
    const int n = 2 + rng.next_int_1_to_n(30);
    std::vector<double> v(n);
    double vmax = -1e300;
    for (double& x : v) {
      x = 50.0 * rng.next_normal();
      vmax = std::max(vmax, x);
    }
    const double mu = 0.01 + rng.next_unit_open();
    const double s = smoothed_max(v, mu);
    if (!(s >= vmax && s <= vmax + mu * std::log(static_cast<double>(n)) + 1e-12)) {
      ok = false;
      detail = "sandwich violated: " + fmt(s) + " with max " + fmt(vmax);
    }
  }
  // Constant vectors must sit exactly at the upper end.
  for (int n : {1, 2, 7, 64}) {
    const double c = -3.25;
    const std::vector<double> v(n, c);
    const double want = c + 0.375 * std::log(static_cast<double>(n));
    if (smoothed_max(v, 0.375) != want) {
      ok = false;
      detail = "constant vector of length " + std::to_string(n) + ": " +
               fmt(smoothed_max(v, 0.375)) + " vs " + fmt(want);
    }
  }
  report(11, ok, "soft max is sandwiched and exact on constant vectors", detail);
}

void criterion_12_strategy_descent() {
  bool ok = true;
  std::string detail;
  for (int inst = 0; inst < 10 && ok; ++inst) {
    const Matrix w = random_matrix(16, 16, 15000 + inst);
    AmmConfig cfg;
    try {
      const AmmSolution sol = amm_solve(w, cfg);
      if (sol.trace.objectives.empty() ||
          sol.smoothed_objective > sol.trace.objectives.front() + 1e-12) {
        ok = false;
        detail = "instance " + std::to_string(inst) + ": objective rose from " +
                 fmt(sol.trace.objectives.empty() ? 0.0 : sol.trace.objectives.front()) +
                 " to " + fmt(sol.smoothed_objective);
        break;
      }
      for (double lam : sol.trace.min_eigenvalues) {
        if (!(lam >= sol.eig_floor)) {
          ok = false;
          detail = "instance " + std::to_string(inst) + ": iterate eigenvalue " + fmt(lam) +
                   " under floor " + fmt(sol.eig_floor);
          break;
        }
      }
      const SymEigResult eig = sym_eig(sol.m_matrix);
      if (ok && !(eig.values.back() >= sol.eig_floor * (1.0 - 1e-9))) {
        ok = false;
        detail = "instance " + std::to_string(inst) + ": final eigenvalue " +
                 fmt(eig.values.back()) + " under floor " + fmt(sol.eig_floor);
      }
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
  }
  report(12, ok, "strategy solver descends and keeps every iterate in the cone", detail);
}

void criterion_13_convergence_trend(const std::vector<SolvedInstance>& solved) {
  // The probe points are epoch ends: the iterate has settled at its penalty
  // level, so the comparison measures the trend across penalty decades rather
  // than the transient right after a penalty bump.
  int passing = 0;
  for (const SolvedInstance& si : solved) {
    const std::vector<OuterRecord>& outer = si.trace.outer;
    if (outer.empty()) continue;
    const double final_obj = outer.back().objective;

    // k1: last record of the leading run at the initial penalty.
    std::size_t k1 = 0;
    while (k1 + 1 < outer.size() && outer[k1 + 1].beta == outer[0].beta) ++k1;
    const double gap1 = std::abs(outer[k1].objective - final_obj);
    if (gap1 <= 1e-12 * std::max(1.0, std::abs(final_obj))) {
      ++passing;  // already converged by the first probe point
      continue;
    }

    // k2: last record of the first epoch whose penalty is >= 10x ahead.
    std::size_t j = k1 + 1;
    while (j < outer.size() && outer[j].beta < 10.0 * outer[k1].beta) ++j;
    if (j >= outer.size()) {
      ++passing;  // converged before the penalty ever grew 10x
      continue;
    }
    std::size_t k2 = j;
    while (k2 + 1 < outer.size() && outer[k2 + 1].beta == outer[j].beta) ++k2;
    const double gap2 = std::abs(outer[k2].objective - final_obj);
    if (gap2 <= gap1 / 10.0) ++passing;
  }
  const bool ok = passing >= 18;
  report(13, ok, "objective gap shrinks an order of magnitude per penalty decade",
         std::to_string(passing) + "/20 instances");
}

void criterion_14_csv_determinism() {
  bool ok = true;
  std::string detail;
  const auto dir = std::filesystem::temp_directory_path() / "lrmech_acceptance_csv";
  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  std::filesystem::create_directories(dir);

  const auto plan_path = dir / "plan.txt";
  {
    std::ofstream plan(plan_path);
    plan << "family = wrange\n"
            "m = 8\n"
            "n = 16\n"
            "mechanisms = nod, nor, lrm\n"
            "sweep = epsilon\n"
            "sweep_values = 1.0, 0.5\n"
            "repetitions = 3\n"
            "seed = 7\n";
  }

  auto run_once = [&](const std::string& csv_name) -> std::string {
    const auto csv = dir / csv_name;
    const std::string cmd = std::string("\"") + LRMECH_BENCH_BINARY + "\" run --plan \"" +
                            plan_path.string() + "\" --out \"" + csv.string() +
                            "\" --stable-output > /dev/null";
    const int status = std::system(cmd.c_str());
    if (status != 0) return "";
    std::ifstream in(csv, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const std::string first = run_once("a.csv");
  const std::string second = run_once("b.csv");
  if (first.empty() || second.empty()) {
    ok = false;
    detail = "benchmark run failed or produced no output";
  } else if (first != second) {
    ok = false;
    detail = "outputs differ (" + std::to_string(first.size()) + " vs " +
             std::to_string(second.size()) + " bytes)";
  } else {
    detail = std::to_string(first.size()) + " identical bytes";
  }
  std::filesystem::remove_all(dir, ec);
  report(14, ok, "repeated stable-output runs are byte-identical", detail);
}

}  // namespace

int main() {
  criterion_1_laplace_calibration();
  criterion_2_factored_error_monte_carlo();
  criterion_3_scale_invariance();
  const std::vector<SolvedInstance> solved = criterion_4_solver_feasibility();
  criterion_5_trace_bound(solved);
  criterion_6_low_rank_dominance();
  criterion_7_epsilon_scaling();
  criterion_8_projection_oracle();
  criterion_9_subsolver_equivalence();
  criterion_10_gradient_checks();
  criterion_11_softmax_sandwich();
  criterion_12_strategy_descent();
  criterion_13_convergence_trend(solved);
  criterion_14_csv_determinism();

  if (g_failures == 0) {
    std::printf("all 14 criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", g_failures);
  }
  return g_failures;
}
