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

#include "lrmech/lrm_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "lrmech/linalg.hpp"
#include "lrmech/rng.hpp"

namespace lrmech {

namespace {

double sum_abs(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

int resolve_r(const SvdResult& decomp, const SolverConfig& cfg) {
  if (cfg.r > 0) return cfg.r;
  return std::max(1, static_cast<int>(std::ceil(1.2 * decomp.rank)));
}

double resolve_max_beta(const SolverConfig& cfg) {
  return cfg.max_beta > 0.0 ? cfg.max_beta
                            : cfg.beta0 * static_cast<double>(std::uint64_t{1} << 30);
}

double resolve_chi(const SolverConfig& cfg, int r, int n) {
  return cfg.nesterov_chi > 0.0 ? cfg.nesterov_chi
                                : static_cast<double>(r) * static_cast<double>(n) * 1e-12;
}

}  // namespace

void SolverConfig::validate() const {
  if (r < 0) throw std::invalid_argument("SolverConfig: r must be >= 1 (or 0 for automatic)");
  if (gamma < 0.0 || !std::isfinite(gamma)) {
    throw std::invalid_argument("SolverConfig: gamma must be >= 0");
  }
  if (!(beta0 > 0.0)) throw std::invalid_argument("SolverConfig: beta0 must be > 0");
  if (!(beta_growth > 1.0)) throw std::invalid_argument("SolverConfig: beta_growth must be > 1");
  if (beta_period < 1) throw std::invalid_argument("SolverConfig: beta_period must be >= 1");
  if (max_outer < 1) throw std::invalid_argument("SolverConfig: max_outer must be >= 1");
  if (inner_max_sweeps < 1 || nesterov_max_iters < 1 || backtrack_max_doublings < 1) {
    throw std::invalid_argument("SolverConfig: iteration caps must be >= 1");
  }
}

std::vector<double> project_l1_ball(const std::vector<double>& v, double radius) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("project_l1_ball: radius must be > 0");
  }
  if (sum_abs(v) <= radius) return v;

  // Threshold search on the sorted magnitudes: the projection is
  // sign(v_i) * max(|v_i| - theta, 0) with theta chosen so the result's L1
  // norm equals the radius; the largest prefix length whose smallest kept
  // magnitude stays above the prefix threshold determines theta.
  std::vector<double> mags(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    cumulative += mags[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (mags[k] - candidate > 0.0) theta = candidate;
  }

  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double shrunk = std::abs(v[i]) - theta;
    out[i] = shrunk > 0.0 ? (v[i] > 0.0 ? shrunk : -shrunk) : 0.0;
  }

  // The arithmetic above can leave the result a few ulps outside the ball;
  // shave the excess off the largest entry so feasibility holds exactly in
  // floating point (and re-projection is a no-op, bit for bit).
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double total = sum_abs(out);
    if (total <= radius) break;
    std::size_t largest = 0;
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (std::abs(out[i]) > std::abs(out[largest])) largest = i;
    }
    const double excess = total - radius;
    const double mag = std::max(std::abs(out[largest]) - excess, 0.0);
    out[largest] = out[largest] > 0.0 ? mag : -mag;
  }
  return out;
}

Matrix project_columns_l1(const Matrix& l, double radius) {
  Matrix out = l;
  std::vector<double> column(l.rows());
  for (int j = 0; j < l.cols(); ++j) {
    for (int i = 0; i < l.rows(); ++i) column[i] = l(i, j);
    std::vector<double> projected = project_l1_ball(column, radius);
    for (int i = 0; i < l.rows(); ++i) out(i, j) = projected[i];
  }
  return out;
}

Matrix update_b(const Matrix& l, const Matrix& w, const Matrix& pi, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("update_b: beta must be > 0");
  if (l.cols() != w.cols() || pi.rows() != w.rows() || pi.cols() != w.cols()) {
    throw std::invalid_argument("update_b: dimension mismatch");
  }
  const Matrix lt = transpose(l);
  const Matrix rhs = (beta * w + pi) * lt;  // m x r
  Matrix gram = l * lt;                     // r x r, exactly symmetric
  gram *= beta;
  for (int i = 0; i < gram.rows(); ++i) gram(i, i) += 1.0;
  // B * gram = rhs with gram SPD: solve gram * B^T = rhs^T.
  return transpose(solve_spd(gram, transpose(rhs)));
}

double inner_objective_l(const Matrix& l, const Matrix& b, const Matrix& w, const Matrix& pi,
                         double beta, Matrix* gradient) {
  if (b.cols() != l.rows() || l.cols() != w.cols() || b.rows() != w.rows() ||
      pi.rows() != w.rows() || pi.cols() != w.cols()) {
    throw std::invalid_argument("inner_objective_l: dimension mismatch");
  }
  const Matrix bt = transpose(b);
  const Matrix h = bt * b;               // r x r
  const Matrix f = bt * (beta * w + pi);  // r x n
  const Matrix hl = h * l;
  const double value = 0.5 * beta * dot(l, hl) - dot(f, l);
  if (gradient != nullptr) {
    *gradient = beta * hl - f;
  }
  return value;
}

double alm_objective(const Matrix& b, const Matrix& l, const Matrix& w, const Matrix& pi,
                     double beta) {
  const Matrix residual = w - b * l;
  return 0.5 * dot(b, b) + dot(pi, residual) + 0.5 * beta * dot(residual, residual);
}

NesterovResult nesterov_solve_l(const Matrix& b, const Matrix& w, const Matrix& pi, double beta,
                                const Matrix& l0, const SolverConfig& cfg) {
  cfg.validate();
  if (!(beta > 0.0)) throw std::invalid_argument("nesterov_solve_l: beta must be > 0");
  const int r = b.cols();
  const int n = w.cols();
  if (l0.rows() != r || l0.cols() != n) {
    throw std::invalid_argument("nesterov_solve_l: l0 shape mismatch");
  }
  const double chi = resolve_chi(cfg, r, n);

  // G(L) = 0.5*beta*<L, H L> - <F, L> with H = B^T B and F = B^T (beta*W + pi),
  // both fixed for the whole solve.
  const Matrix bt = transpose(b);
  const Matrix h = bt * b;
  const Matrix f = bt * (beta * w + pi);
  const auto g_value = [&](const Matrix& l, Matrix* hl_out) {
    Matrix hl = h * l;
    const double value = 0.5 * beta * dot(l, hl) - dot(f, l);
    if (hl_out != nullptr) *hl_out = std::move(hl);
    return value;
  };

  Matrix l_prev = project_columns_l1(l0, 1.0);
  Matrix l_cur = l_prev;
  Matrix best = l_cur;
  double best_g = g_value(l_cur, nullptr);

  double delta_prev = 0.0;  // delta^(t-2)
  double delta_cur = 1.0;   // delta^(t-1)
  double omega_prev = 1.0;

  NesterovResult result;
  for (int t = 1; t <= cfg.nesterov_max_iters; ++t) {
    result.iterations = t;
    const double alpha = (delta_prev - 1.0) / delta_cur;
    Matrix s = l_cur;
    if (alpha != 0.0) {
      s += alpha * (l_cur - l_prev);
    }
    Matrix hs;
    const double g_s = g_value(s, &hs);
    const Matrix grad_s = beta * hs - f;

    Matrix candidate;
    double g_candidate = 0.0;
    double omega = omega_prev;
    bool stopped = false;
    for (int j = 0; j <= cfg.backtrack_max_doublings; ++j) {
      omega = std::ldexp(omega_prev, j);  // 2^j * omega^(t-1)
      candidate = project_columns_l1(s - (1.0 / omega) * grad_s, 1.0);
      Matrix step = candidate;
      step -= s;
      const double step_norm2 = dot(step, step);
      if (std::sqrt(step_norm2) < chi) {
        stopped = true;
        g_candidate = g_value(candidate, nullptr);
        break;
      }
      g_candidate = g_value(candidate, nullptr);
      // Quadratic upper model around S, evaluated at the projected
      // candidate: once omega reaches the curvature of G the model
      // majorizes G there and the step is accepted (descent lemma).
      const double model = g_s + dot(grad_s, step) + 0.5 * omega * step_norm2;
      if (g_candidate <= model) break;
      // Otherwise double omega (halve the step) and retry; past the cap the
      // projected step is accepted as-is, which is safe because the returned
      // iterate is the best seen.
    }

    if (g_candidate < best_g) {
      best_g = g_candidate;
      best = candidate;
    }
    if (stopped) {
      result.l = g_candidate <= best_g ? std::move(candidate) : std::move(best);
      return result;
    }
    omega_prev = omega;
    l_prev = std::move(l_cur);
    l_cur = std::move(candidate);
    const double delta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * delta_cur * delta_cur));
    delta_prev = delta_cur;
    delta_cur = delta_next;
  }
  result.hit_iteration_cap = true;
  result.l = std::move(best);
  return result;
}

std::pair<Matrix, Matrix> init_decomposition(const Matrix& w, const SolverConfig& cfg) {
  cfg.validate();
  const SvdResult decomp = svd(w);
  const int r = resolve_r(decomp, cfg);
  const int s = static_cast<int>(decomp.sigma.size());
  const int n = w.cols();
  const double inv_sqrt_r = 1.0 / std::sqrt(static_cast<double>(r));

  // Rows of V scaled by 1/sqrt(r): column j then has L1 norm at most
  // sqrt(min(r,s)/r) * ||V column j||_2 <= 1. Rows past min(r, s) stay zero.
  Matrix l0(r, n);
  for (int k = 0; k < std::min(r, s); ++k) {
    for (int j = 0; j < n; ++j) l0(k, j) = decomp.v(k, j) * inv_sqrt_r;
  }
  Matrix pi0(w.rows(), w.cols());
  Matrix b0 = update_b(l0, w, pi0, cfg.beta0);
  return {std::move(b0), std::move(l0)};
}

std::pair<Decomposition, SolveTrace> decompose(const Matrix& w, const SolverConfig& cfg) {
  cfg.validate();
  if (!w.all_finite() || w.rows() < 1 || w.cols() < 1) {
    throw std::invalid_argument("decompose: workload must be non-empty and finite");
  }
  const double gamma_eff = cfg.gamma * std::max(1.0, frobenius_norm(w));
  const double max_beta = resolve_max_beta(cfg);

  auto [b, l] = init_decomposition(w, cfg);
  Matrix pi(w.rows(), w.cols());
  double beta = cfg.beta0;

  SolveTrace trace;
  Matrix best_b = b;
  Matrix best_l = l;
  double best_tau = std::numeric_limits<double>::infinity();
  int best_outer = -1;

  // The alternation is nonconvex, and from some starting points it parks at a
  // stationary pair whose residual no amount of penalty growth will shrink.
  // When an epoch of beta doublings goes by with the residual far above the
  // target and barely moving, the run is restarted from a seeded feasible
  // point; the best pair seen anywhere is what a failed run returns.
  int local_k = 0;    // outer iterations since the last (re)start
  int restarts = 0;
  double epoch_tau = std::numeric_limits<double>::infinity();

  for (int k = 1; k <= cfg.max_outer; ++k) {
    ++local_k;
    // Alternate the closed-form B step and the accelerated L step until the
    // subproblem objective stalls.
    double j_prev = alm_objective(b, l, w, pi, beta);
    int sweeps = 0;
    for (int sweep = 0; sweep < cfg.inner_max_sweeps; ++sweep) {
      b = update_b(l, w, pi, beta);
      l = nesterov_solve_l(b, w, pi, beta, l, cfg).l;
      ++sweeps;
      const double j_new = alm_objective(b, l, w, pi, beta);
      const double change = std::abs(j_prev - j_new);
      j_prev = j_new;
      if (change <= cfg.inner_tol * std::max(1.0, std::abs(j_new))) break;
    }

    const Matrix residual = w - b * l;
    const double tau = frobenius_norm(residual);
    trace.outer.push_back({0.5 * dot(b, b), tau, beta, sweeps});

    if (tau < best_tau) {
      best_tau = tau;
      best_b = b;
      best_l = l;
      best_outer = static_cast<int>(trace.outer.size()) - 1;
    }
    if (tau <= gamma_eff) {
      trace.termination = "converged";
      trace.returned_outer = static_cast<int>(trace.outer.size()) - 1;
      return {Decomposition(std::move(b), std::move(l), w), std::move(trace)};
    }
    if (beta > max_beta) {
      trace.termination = "penalty-limit";
      trace.returned_outer = static_cast<int>(trace.outer.size()) - 1;
      return {Decomposition(std::move(b), std::move(l), w), std::move(trace)};
    }
    if (local_k % cfg.beta_period == 0) {
      // Epoch boundary. Stuck means two full epochs behind us, residual still
      // an order of magnitude above the target, and under 30% improvement
      // across the last epoch (healthy runs shed ~50% per epoch once the
      // penalty bites; a run within 10x of the target is left to finish).
      if (local_k >= 3 * cfg.beta_period && tau > 10.0 * gamma_eff &&
          tau > 0.7 * epoch_tau) {
        SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(1 + restarts)));
        for (int i = 0; i < l.rows(); ++i) {
          for (int j = 0; j < l.cols(); ++j) l(i, j) = rng.next_normal();
        }
        l = project_columns_l1(l, 1.0);
        pi = Matrix(w.rows(), w.cols());
        beta = cfg.beta0;
        b = update_b(l, w, pi, beta);
        local_k = 0;
        epoch_tau = std::numeric_limits<double>::infinity();
        ++restarts;
        continue;  // fresh multiplier scheme; nothing to accumulate yet
      }
      epoch_tau = tau;
      beta *= cfg.beta_growth;
    }
    pi += beta * residual;  // multiplier step uses the already-updated beta
  }

  trace.termination = "budget-exhausted";
  trace.returned_outer = best_outer;
  return {Decomposition(std::move(best_b), std::move(best_l), w), std::move(trace)};
}

BoundReport bound_report(const Matrix& w, const PrivacyBudget& eps) {
  const SvdResult decomp = svd(w);
  if (decomp.rank < 1) {
    throw std::invalid_argument("bound_report: zero workload has no spectral bounds");
  }
  BoundReport report;
  report.rank = decomp.rank;
  report.lambdas.assign(decomp.sigma.begin(), decomp.sigma.begin() + decomp.rank);
  report.epsilon = eps.epsilon;

  const double r = static_cast<double>(report.rank);
  double sum_sq = 0.0;
  double sum_log = 0.0;
  for (double lam : report.lambdas) {
    sum_sq += lam * lam;
    sum_log += std::log(lam);
  }
  report.upper = r * sum_sq;
  // (2^r / r!)^(2/r) * (prod lambda)^(2/r) * r^3, evaluated in logs so large
  // ranks neither overflow nor underflow.
  const double log_shape = (2.0 / r) * (r * std::log(2.0) - std::lgamma(r + 1.0) + sum_log);
  report.lower = std::exp(log_shape) * r * r * r;
  report.c_ratio = report.lambdas.front() / report.lambdas.back();
  report.approx_factor = (report.c_ratio / 4.0) * (report.c_ratio / 4.0) * r;
  return report;
}

void save_decomposition(const std::string& dir, const Decomposition& dec, double gamma,
                        std::uint64_t seed, const std::string& termination) {
  std::filesystem::create_directories(dir);
  save_matrix(dir + "/B.mat", dec.b);
  save_matrix(dir + "/L.mat", dec.l);
  std::ofstream meta(dir + "/meta");
  if (!meta) {
    throw std::runtime_error("save_decomposition: cannot write '" + dir + "/meta'");
  }
  char buf[40];
  meta << "r = " << dec.r() << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", gamma);
  meta << "gamma = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", dec.residual);
  meta << "residual = " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", dec.max_col_l1);
  meta << "max_col_l1 = " << buf << "\n";
  meta << "seed = " << seed << "\n";
  meta << "termination = " << termination << "\n";
  if (!meta) {
    throw std::runtime_error("save_decomposition: write to '" + dir + "/meta' failed");
  }
}

std::pair<Decomposition, DecompositionMeta> load_decomposition(const std::string& dir,
                                                               const Matrix& w) {
  Matrix b = load_matrix(dir + "/B.mat");
  Matrix l = load_matrix(dir + "/L.mat");

  std::ifstream in(dir + "/meta");
  if (!in) {
    throw std::runtime_error("load_decomposition: cannot open '" + dir + "/meta'");
  }
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("load_decomposition: '" + dir + "/meta' line " +
                               std::to_string(line_no) + ": expected 'key = value'");
    }
    auto strip = [](std::string s) {
      const std::size_t a = s.find_first_not_of(" \t\r");
      const std::size_t z = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
    };
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::runtime_error("load_decomposition: '" + dir + "/meta' missing key '" + key +
                               "'");
    }
    return it->second;
  };

  DecompositionMeta meta;
  meta.r = std::stoi(need("r"));
  meta.gamma = std::stod(need("gamma"));
  meta.residual = std::stod(need("residual"));
  meta.max_col_l1 = std::stod(need("max_col_l1"));
  meta.seed = std::stoull(need("seed"));
  meta.termination = need("termination");

  Decomposition dec(std::move(b), std::move(l), w);
  if (dec.r() != meta.r) {
    throw std::runtime_error("load_decomposition: meta r = " + std::to_string(meta.r) +
                             " but B has " + std::to_string(dec.r()) + " columns");
  }
  if (std::abs(dec.residual - meta.residual) > 1e-10 * std::max(1.0, dec.residual) ||
      std::abs(dec.max_col_l1 - meta.max_col_l1) > 1e-10 * std::max(1.0, dec.max_col_l1)) {
    throw std::runtime_error(
        "load_decomposition: stored residual/max_col_l1 do not match the matrices "
        "(wrong workload or corrupted files?)");
  }
  return {std::move(dec), std::move(meta)};
}

}  // namespace lrmech
