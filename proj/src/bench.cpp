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

#include "lrmech/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lrmech/amm_solver.hpp"
#include "lrmech/linalg.hpp"
#include "lrmech/lrm_solver.hpp"
#include "lrmech/rng.hpp"

namespace lrmech {

namespace {

constexpr int kDeskMaxN = 1024;
constexpr int kDeskMaxM = 256;
constexpr int kAmmMaxN = 256;

std::string strip(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  const std::size_t z = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? std::string() : s.substr(a, z - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(strip(item));
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  const std::string t = strip(s);
  if (!t.empty()) {
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() + t.size() && std::isfinite(v)) {
      return v;
    }
  }
  throw PlanError("plan key '" + key + "': '" + s + "' is not a finite number");
}

long long parse_int(const std::string& s, const std::string& key) {
  const std::string t = strip(s);
  if (!t.empty()) {
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size()) {
      return v;
    }
  }
  throw PlanError("plan key '" + key + "': '" + s + "' is not an integer");
}

std::uint64_t parse_seed(const std::string& s, const std::string& key) {
  const std::string t = strip(s);
  if (!t.empty() && t.find('-') == std::string::npos) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (end == t.c_str() + t.size()) {
      return v;
    }
  }
  throw PlanError("plan key '" + key + "': '" + s + "' is not an unsigned integer");
}

// The parameters one sweep point runs with.
struct SweepPoint {
  double value = 0.0;
  WorkloadSpec ws;
  double epsilon = 1.0;
  double gamma = 0.0;
  int r = 0;  // 0 = automatic
};

std::vector<SweepPoint> resolve_points(const ExperimentPlan& plan) {
  std::vector<SweepPoint> points;
  points.reserve(plan.sweep_values.size());
  for (double v : plan.sweep_values) {
    SweepPoint p;
    p.value = v;
    p.ws.family = plan.family;
    p.ws.m = plan.m;
    p.ws.n = plan.n;
    p.ws.s = plan.family == WorkloadFamily::kWRelated ? plan.s : 1;
    p.ws.seed = plan.workload_seed;
    p.epsilon = plan.epsilon;
    p.gamma = plan.gamma;
    p.r = plan.r;
    if (plan.sweep == "epsilon") {
      p.epsilon = v;
    } else if (plan.sweep == "n") {
      p.ws.n = static_cast<int>(v);
    } else if (plan.sweep == "m") {
      p.ws.m = static_cast<int>(v);
    } else if (plan.sweep == "s") {
      p.ws.s = static_cast<int>(v);
    } else if (plan.sweep == "r") {
      p.r = static_cast<int>(v);
    } else if (plan.sweep == "gamma") {
      p.gamma = v;
    }
    points.push_back(p);
  }
  return points;
}

void require_integral(double v, const std::string& axis) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
    throw PlanError("sweep axis '" + axis + "': value " + std::to_string(v) +
                    " must be a positive integer");
  }
}

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (mechanisms.empty()) {
    throw PlanError("plan: 'mechanisms' must list at least one of NOD, NOR, LRM, AMM");
  }
  if (repetitions < 1) {
    throw PlanError("plan: 'repetitions' must be >= 1");
  }
  if (sweep_values.empty()) {
    throw PlanError("plan: 'sweep_values' must be non-empty");
  }
  static const std::set<std::string> kAxes = {"epsilon", "n", "m", "s", "r", "gamma"};
  if (kAxes.find(sweep) == kAxes.end()) {
    throw PlanError("plan: 'sweep' must be one of epsilon, n, m, s, r, gamma (got '" +
                    sweep + "')");
  }
  if (sweep == "s" && family != WorkloadFamily::kWRelated) {
    throw PlanError("plan: sweeping 's' requires family = wrelated");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw PlanError("plan: 'epsilon' must be positive");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw PlanError("plan: 'gamma' must be positive");
  }
  if (r < 0) {
    throw PlanError("plan: 'r' must be >= 0 (0 = automatic)");
  }
  if (!(r_multiplier > 0.0) || !std::isfinite(r_multiplier)) {
    throw PlanError("plan: 'r_multiplier' must be positive");
  }
  if (dataset.empty()) {
    throw PlanError("plan: 'dataset' must be 'synthetic' or a counts file path");
  }
  if (dataset_size < 0) {
    throw PlanError("plan: 'dataset_size' must be >= 0 (0 = automatic)");
  }
  if (!std::isfinite(dataset_mu) || !std::isfinite(dataset_sigma) || dataset_sigma < 0.0) {
    throw PlanError("plan: dataset_mu must be finite and dataset_sigma >= 0");
  }

  for (double v : sweep_values) {
    if (!std::isfinite(v)) {
      throw PlanError("plan: sweep value is not finite");
    }
    if (sweep == "epsilon" || sweep == "gamma") {
      if (!(v > 0.0)) {
        throw PlanError("plan: sweep axis '" + sweep + "' needs positive values");
      }
    } else {
      require_integral(v, sweep);
    }
  }

  int max_n = 0;
  for (const SweepPoint& p : resolve_points(*this)) {
    try {
      p.ws.validate();
    } catch (const std::invalid_argument& e) {
      throw PlanError("plan: sweep point " + fmt10(p.value) + ": " + e.what());
    }
    if (!full_scale && (p.ws.n > kDeskMaxN || p.ws.m > kDeskMaxM)) {
      throw PlanError("plan: sweep point " + fmt10(p.value) + " asks for m = " +
                      std::to_string(p.ws.m) + ", n = " + std::to_string(p.ws.n) +
                      "; sizes beyond m = " + std::to_string(kDeskMaxM) + ", n = " +
                      std::to_string(kDeskMaxN) +
                      " need the --full flag (expect long runtimes)");
    }
    max_n = std::max(max_n, p.ws.n);
  }
  if (dataset_size > 0 && dataset_size < max_n) {
    throw PlanError("plan: 'dataset_size' (" + std::to_string(dataset_size) +
                    ") is smaller than the largest swept domain (" +
                    std::to_string(max_n) + ")");
  }
}

ExperimentPlan parse_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("parse_plan: cannot open '" + path + "'");
  }
  ExperimentPlan plan;
  std::set<std::string> seen;
  std::set<std::string> required_missing = {"family", "mechanisms", "sweep",
                                            "sweep_values"};
  std::string line;
  int line_no = 0;
  bool have_m = false;
  bool have_n = false;
  bool have_s = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw PlanError("plan '" + path + "' line " + std::to_string(line_no) +
                      ": expected 'key = value'");
    }
    const std::string key = strip(text.substr(0, eq));
    const std::string value = strip(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw PlanError("plan '" + path + "' line " + std::to_string(line_no) +
                      ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw PlanError("plan '" + path + "' line " + std::to_string(line_no) +
                      ": duplicate key '" + key + "'");
    }
    required_missing.erase(key);

    try {
      if (key == "family") {
        plan.family = family_from_name(value);
      } else if (key == "m") {
        plan.m = static_cast<int>(parse_int(value, key));
        have_m = true;
      } else if (key == "n") {
        plan.n = static_cast<int>(parse_int(value, key));
        have_n = true;
      } else if (key == "s") {
        plan.s = static_cast<int>(parse_int(value, key));
        have_s = true;
      } else if (key == "workload_seed") {
        plan.workload_seed = parse_seed(value, key);
      } else if (key == "mechanisms") {
        for (const std::string& name : split_list(value)) {
          plan.mechanisms.push_back(mechanism_from_name(name));
        }
      } else if (key == "epsilon") {
        plan.epsilon = parse_double(value, key);
      } else if (key == "repetitions") {
        plan.repetitions = static_cast<int>(parse_int(value, key));
      } else if (key == "sweep") {
        plan.sweep = value;
      } else if (key == "sweep_values") {
        for (const std::string& item : split_list(value)) {
          plan.sweep_values.push_back(parse_double(item, key));
        }
      } else if (key == "dataset") {
        plan.dataset = value;
      } else if (key == "dataset_seed") {
        plan.dataset_seed = parse_seed(value, key);
      } else if (key == "dataset_mu") {
        plan.dataset_mu = parse_double(value, key);
      } else if (key == "dataset_sigma") {
        plan.dataset_sigma = parse_double(value, key);
      } else if (key == "dataset_size") {
        plan.dataset_size = static_cast<int>(parse_int(value, key));
      } else if (key == "gamma") {
        plan.gamma = parse_double(value, key);
      } else if (key == "r_multiplier") {
        plan.r_multiplier = parse_double(value, key);
      } else if (key == "r") {
        plan.r = static_cast<int>(parse_int(value, key));
      } else if (key == "seed") {
        plan.seed = parse_seed(value, key);
      } else if (key == "output") {
        plan.output = value;
      } else {
        throw PlanError("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      // family_from_name / mechanism_from_name reject with this type.
      throw PlanError("plan '" + path + "' line " + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const PlanError& e) {
      throw PlanError("plan '" + path + "' line " + std::to_string(line_no) + ": " +
                      e.what());
    }
  }

  // The swept key may stay unset; every other shape key is mandatory.
  if (plan.sweep != "m" && !have_m) required_missing.insert("m");
  if (plan.sweep != "n" && !have_n) required_missing.insert("n");
  if (plan.family == WorkloadFamily::kWRelated && plan.sweep != "s" && !have_s) {
    required_missing.insert("s");
  }
  if (!required_missing.empty()) {
    std::string keys;
    for (const std::string& k : required_missing) {
      keys += keys.empty() ? k : ", " + k;
    }
    throw PlanError("plan '" + path + "': missing required key(s): " + keys);
  }

  // Placeholders so WorkloadSpec stays constructible while the axis fills
  // the real value in.
  if (plan.sweep == "m" && !have_m) plan.m = 1;
  if (plan.sweep == "n" && !have_n) plan.n = 1;
  if (plan.sweep == "s" && !have_s) plan.s = 1;
  return plan;
}

std::uint64_t trial_seed(std::uint64_t master, Mechanism mech, int trial) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(mech)),
                     static_cast<std::uint64_t>(trial));
}

int default_r(const Matrix& w, double multiplier) {
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw std::invalid_argument("default_r: multiplier must be positive");
  }
  const int rank = svd(w).rank;
  return std::max(1, static_cast<int>(std::ceil(multiplier * rank)));
}

namespace {

double per_query_mse(const std::vector<double>& exact, const std::vector<double>& noisy) {
  double sum = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double diff = exact[i] - noisy[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(exact.size());
}

}  // namespace

std::vector<ResultRow> run_plan(const ExperimentPlan& plan) {
  plan.validate();
  const std::vector<SweepPoint> points = resolve_points(plan);

  int max_n = 0;
  for (const SweepPoint& p : points) {
    max_n = std::max(max_n, p.ws.n);
  }

  std::vector<double> base_counts;
  if (plan.dataset == "synthetic") {
    const int size = plan.dataset_size > 0 ? plan.dataset_size : max_n;
    base_counts =
        gen_lognormal_counts(size, plan.dataset_seed, plan.dataset_mu, plan.dataset_sigma);
  } else {
    base_counts = load_counts(plan.dataset);
    if (static_cast<int>(base_counts.size()) < max_n) {
      throw std::runtime_error("counts file '" + plan.dataset + "' has " +
                               std::to_string(base_counts.size()) +
                               " values but the plan needs at least " +
                               std::to_string(max_n));
    }
  }

  // The workload only depends on the sweep axis for shape axes; solve the
  // generator once otherwise.
  const bool workload_varies = plan.sweep == "n" || plan.sweep == "m" || plan.sweep == "s";
  Matrix shared_w;
  if (!workload_varies) {
    shared_w = generate_workload(points.front().ws);
  }

  std::vector<ResultRow> rows;
  rows.reserve(points.size() * plan.mechanisms.size());

  for (const SweepPoint& point : points) {
    Matrix local_w;
    if (workload_varies) {
      local_w = generate_workload(point.ws);
    }
    const Matrix& work = workload_varies ? local_w : shared_w;

    const Dataset data = merge_domain(base_counts, point.ws.n);
    const std::vector<double> exact = mat_vec(work, data.counts);
    const PrivacyBudget eps(point.epsilon);
    const double m_queries = static_cast<double>(point.ws.m);

    // Decompositions are independent of epsilon and the trial seeds, so one
    // solve per sweep point serves every repetition.
    std::optional<Decomposition> dec;
    double lrm_seconds = 0.0;
    std::optional<AmmSolution> amm;
    double amm_seconds = 0.0;
    double amm_analytic = 0.0;

    for (Mechanism mech : plan.mechanisms) {
      if (mech == Mechanism::kLrm && !dec.has_value()) {
        SolverConfig cfg;
        cfg.r = point.r > 0 ? point.r : default_r(work, plan.r_multiplier);
        cfg.gamma = point.gamma;
        cfg.seed = plan.seed;
        const auto start = std::chrono::steady_clock::now();
        auto solved = decompose(work, cfg);
        const auto stop = std::chrono::steady_clock::now();
        lrm_seconds = std::chrono::duration<double>(stop - start).count();
        dec.emplace(std::move(solved.first));
      }
      if (mech == Mechanism::kAmm && !amm.has_value()) {
        if (point.ws.n > kAmmMaxN) {
          std::cerr << "[lrmech] note: sweep point " << fmt10(point.value)
                    << ": AMM skipped, n = " << point.ws.n << " exceeds "
                    << kAmmMaxN << "\n";
          continue;
        }
        AmmConfig cfg;
        cfg.seed = plan.seed;
        try {
          const auto start = std::chrono::steady_clock::now();
          AmmSolution sol = amm_solve(work, cfg);
          const auto stop = std::chrono::steady_clock::now();
          amm_seconds = std::chrono::duration<double>(stop - start).count();
          amm = std::move(sol);
        } catch (const std::invalid_argument& e) {
          std::cerr << "[lrmech] note: sweep point " << fmt10(point.value)
                    << ": AMM skipped: " << e.what() << "\n";
          continue;
        }
        const Matrix wap = work * pseudo_inverse(amm->strategy);
        const double delta = query_sensitivity(amm->strategy);
        const double f2 = frobenius_norm(wap);
        amm_analytic =
            2.0 * delta * delta * f2 * f2 / (eps.epsilon * eps.epsilon) / m_queries;
      }
    }

    for (Mechanism mech : plan.mechanisms) {
      if (mech == Mechanism::kAmm && !amm.has_value()) {
        continue;  // skipped above, note already printed
      }
      ResultRow row;
      row.sweep_value = point.value;
      row.mechanism = mechanism_name(mech);
      row.seed = derive_seed(plan.seed, static_cast<std::uint64_t>(mech));

      double total = 0.0;
      for (int t = 0; t < plan.repetitions; ++t) {
        const std::uint64_t ts = trial_seed(plan.seed, mech, t);
        NoisyAnswer ans{};
        switch (mech) {
          case Mechanism::kNod:
            ans = answer_nod(work, data, eps, ts);
            break;
          case Mechanism::kNor:
            ans = answer_nor(work, data, eps, ts);
            break;
          case Mechanism::kLrm:
            ans = answer_lrm(*dec, data, eps, ts);
            break;
          case Mechanism::kAmm:
            ans = answer_amm(*amm, work, data, eps, ts);
            break;
        }
        total += per_query_mse(exact, ans.values);
      }
      row.mse = total / static_cast<double>(plan.repetitions);

      switch (mech) {
        case Mechanism::kNod:
          row.analytic = expected_error_nod(work, eps) / m_queries;
          break;
        case Mechanism::kNor:
          row.analytic = expected_error_nor(work, eps) / m_queries;
          break;
        case Mechanism::kLrm:
          row.analytic = expected_error_lrm(*dec, eps) / m_queries;
          row.seconds = lrm_seconds;
          row.has_r = true;
          row.r = dec->r();
          row.has_residual = true;
          row.residual = dec->residual;
          break;
        case Mechanism::kAmm:
          row.analytic = amm_analytic;
          row.seconds = amm_seconds;
          break;
      }
      if (plan.stable_output) {
        row.seconds = 0.0;
      }
      rows.push_back(std::move(row));
    }
  }

  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.mechanism < b.mechanism;
  });
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_csv: no rows to write");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("emit_csv: cannot write '" + path + "'");
  }
  out << "sweep,mechanism,mse,analytic,seconds,r,residual,seed\n";
  for (const ResultRow& row : rows) {
    out << fmt10(row.sweep_value) << ',' << row.mechanism << ',' << fmt10(row.mse) << ','
        << fmt10(row.analytic) << ',' << fmt10(row.seconds) << ',';
    if (row.has_r) {
      out << row.r;
    }
    out << ',';
    if (row.has_residual) {
      out << fmt10(row.residual);
    }
    out << ',' << row.seed << '\n';
  }
  if (!out) {
    throw std::runtime_error("emit_csv: write to '" + path + "' failed");
  }
}

}  // namespace lrmech
