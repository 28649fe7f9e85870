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

#ifndef LRMECH_WORKLOAD_HPP_
#define LRMECH_WORKLOAD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lrmech/matrix.hpp"

namespace lrmech {

enum class WorkloadFamily { kWDiscrete, kWRange, kWRelated };

const char* family_name(WorkloadFamily family);
WorkloadFamily family_from_name(const std::string& name);

// Parameters for the three synthetic workload families. Row i of any family
// is drawn from the generator stream seeded with (seed + i), so individual
// rows are reproducible without generating their predecessors; WRelated uses
// streams seed+0 .. seed+s-1 for the rows of its base matrix A and
// seed+s .. seed+s+m-1 for the rows of the combination matrix C.
struct WorkloadSpec {
  WorkloadFamily family = WorkloadFamily::kWDiscrete;
  int m = 1;  // query count (rows)
  int n = 1;  // domain size (columns)
  int s = 1;  // base-query count, WRelated only; 1 <= s <= min(m, n)
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument on bad parameters
};

// A vector of unit counts. Unit sensitivity is fixed at 1 throughout the
// library: one individual changes exactly one count by at most 1.
struct Dataset {
  std::vector<double> counts;

  static constexpr double kUnitSensitivity = 1.0;

  int n() const { return static_cast<int>(counts.size()); }
  void validate() const;  // finite, non-negative, non-empty
};

// Each entry is +1 with probability 0.02 and -1 otherwise. (Mostly-negative
// matrices are intentional; that is how the family is defined.)
Matrix gen_wdiscrete(const WorkloadSpec& spec);

// Each row is the indicator of a range [a, b] within the 1-indexed domain,
// with a and b the min/max of two independent uniform draws from [1, n].
Matrix gen_wrange(const WorkloadSpec& spec);

// Indicator row for the inclusive 1-indexed interval [a, b]: the building
// block of gen_wrange, exposed so a specific interval can be constructed.
std::vector<double> range_query_row(int a, int b, int n);

// W = C * A with C (m x s) and A (s x n) standard normal; rank(W) <= s.
Matrix gen_wrelated(const WorkloadSpec& spec);

// Dispatch on spec.family.
Matrix generate_workload(const WorkloadSpec& spec);

// Reduce a counts vector to target_n buckets by summing consecutive entries;
// when the length is not divisible, the first (length mod target_n) buckets
// take one extra element. The total is preserved.
Dataset merge_domain(const std::vector<double>& counts, int target_n);

// Synthetic stand-in for real count data: independent log-normal draws,
// counts[i] = exp(mu_log + sigma_log * z_i). Heavy-tailed and non-negative,
// which is the shape count data tends to have.
std::vector<double> gen_lognormal_counts(int n, std::uint64_t seed, double mu_log = 5.0,
                                         double sigma_log = 2.0);

// Counts file: one decimal per line; lines starting with '#' are ignored.
// Parse errors name the offending line; an empty file (no values) is an
// error.
std::vector<double> load_counts(const std::string& path);
void save_counts(const std::string& path, const std::vector<double>& values);

}  // namespace lrmech

#endif  // LRMECH_WORKLOAD_HPP_
