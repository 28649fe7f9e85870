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

#ifndef LRMECH_BENCH_HPP_
#define LRMECH_BENCH_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrmech/matrix.hpp"
#include "lrmech/mechanisms.hpp"
#include "lrmech/workload.hpp"

namespace lrmech {

// Experiment harness: read a plan, sweep one parameter axis, run seeded
// mechanism trials at every sweep point, and emit a CSV of per-query mean
// squared errors alongside the analytic expectations.

// Thrown for anything wrong with the plan itself (unknown keys, missing
// keys, out-of-range values). The CLI maps it to exit code 2; genuine I/O
// failures stay ordinary runtime_errors and exit with 1.
class PlanError : public std::runtime_error {
 public:
  explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

struct ExperimentPlan {
  // Workload shape at the sweep's base point. The swept key is ignored in
  // favor of the sweep values.
  WorkloadFamily family = WorkloadFamily::kWDiscrete;
  int m = 0;
  int n = 0;
  int s = 0;
  std::uint64_t workload_seed = 1;

  std::vector<Mechanism> mechanisms;
  double epsilon = 1.0;
  int repetitions = 20;

  // One of "epsilon", "n", "m", "s", "r", "gamma".
  std::string sweep;
  std::vector<double> sweep_values;

  // "synthetic" or a path to a counts file. The base counts are produced
  // once and merged down to each sweep point's domain size.
  std::string dataset = "synthetic";
  std::uint64_t dataset_seed = 2;
  double dataset_mu = 5.0;
  double dataset_sigma = 2.0;
  int dataset_size = 0;  // 0 = largest domain size the sweep touches

  double gamma = 0.01;
  double r_multiplier = 1.2;
  int r = 0;  // 0 = pick from r_multiplier and the workload rank

  std::uint64_t seed = 42;
  std::string output;  // optional default; the CLI --out flag wins

  // Set from CLI flags, not plan keys.
  bool stable_output = false;
  bool full_scale = false;

  // Structural checks; throws PlanError. Domain sizes beyond n = 1024 or
  // m = 256 are refused unless full_scale is set (they are expensive).
  void validate() const;
};

struct ResultRow {
  double sweep_value = 0.0;
  std::string mechanism;
  double mse = 0.0;       // per-query, averaged over repetitions
  double analytic = 0.0;  // per-query expected squared error
  double seconds = 0.0;   // solver wall time at this sweep point
  bool has_r = false;
  int r = 0;
  bool has_residual = false;
  double residual = 0.0;
  std::uint64_t seed = 0;  // stream seed for this row's trials
};

// Parses `key = value` lines ('#' comments and blank lines skipped) and
// applies defaults. Throws PlanError for malformed or unknown content and
// std::runtime_error when the file cannot be opened.
ExperimentPlan parse_plan(const std::string& path);

// Noise seed for one trial: mechanism id and trial index are folded into
// the master seed, so streams never depend on the sweep axis and common
// random numbers carry across sweep points.
std::uint64_t trial_seed(std::uint64_t master, Mechanism mech, int trial);

// Rank choice when the plan leaves r unset: ceil(multiplier * rank(W)),
// at least 1.
int default_r(const Matrix& w, double multiplier);

// Runs every sweep point: generate the workload, merge the base counts to
// the point's domain, solve each requested decomposition once, run the
// seeded trials, and return rows sorted by (sweep value, mechanism name).
// A budget-exhausted solve is reported through its row's residual; only
// file problems are fatal.
std::vector<ResultRow> run_plan(const ExperimentPlan& plan);

// Writes `sweep,mechanism,mse,analytic,seconds,r,residual,seed` with 10
// significant digits. Refuses an empty row list before touching the path.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace lrmech

#endif  // LRMECH_BENCH_HPP_
