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

#include "lrmech/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lrmech/rng.hpp"

namespace lrmech {

const char* family_name(WorkloadFamily family) {
  switch (family) {
    case WorkloadFamily::kWDiscrete:
      return "wdiscrete";
    case WorkloadFamily::kWRange:
      return "wrange";
    case WorkloadFamily::kWRelated:
      return "wrelated";
  }
  throw std::logic_error("family_name: bad enum value");
}

WorkloadFamily family_from_name(const std::string& name) {
  if (name == "wdiscrete") return WorkloadFamily::kWDiscrete;
  if (name == "wrange") return WorkloadFamily::kWRange;
  if (name == "wrelated") return WorkloadFamily::kWRelated;
  throw std::invalid_argument("unknown workload family '" + name +
                              "' (expected wdiscrete, wrange or wrelated)");
}

void WorkloadSpec::validate() const {
  if (m < 1 || n < 1) {
    throw std::invalid_argument("WorkloadSpec: m and n must be >= 1");
  }
  if (family == WorkloadFamily::kWRelated && (s < 1 || s > std::min(m, n))) {
    throw std::invalid_argument("WorkloadSpec: WRelated needs 1 <= s <= min(m, n), got s = " +
                                std::to_string(s));
  }
}

void Dataset::validate() const {
  if (counts.empty()) {
    throw std::invalid_argument("Dataset: empty counts");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!std::isfinite(counts[i]) || counts[i] < 0.0) {
      throw std::invalid_argument("Dataset: entry " + std::to_string(i) +
                                  " is negative or non-finite");
    }
  }
}

Matrix gen_wdiscrete(const WorkloadSpec& spec) {
  spec.validate();
  if (spec.family != WorkloadFamily::kWDiscrete) {
    throw std::invalid_argument("gen_wdiscrete: spec family mismatch");
  }
  Matrix w(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    SplitMix64 row_rng(spec.seed + static_cast<std::uint64_t>(i));
    double* row = w.row(i);
    for (int j = 0; j < spec.n; ++j) {
      row[j] = row_rng.next_unit_open() < 0.02 ? 1.0 : -1.0;
    }
  }
  return w;
}

std::vector<double> range_query_row(int a, int b, int n) {
  if (n < 1 || a < 1 || b > n || a > b) {
    throw std::invalid_argument("range_query_row: need 1 <= a <= b <= n");
  }
  std::vector<double> row(n, 0.0);
  for (int j = a - 1; j <= b - 1; ++j) row[j] = 1.0;
  return row;
}

Matrix gen_wrange(const WorkloadSpec& spec) {
  spec.validate();
  if (spec.family != WorkloadFamily::kWRange) {
    throw std::invalid_argument("gen_wrange: spec family mismatch");
  }
  Matrix w(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    SplitMix64 row_rng(spec.seed + static_cast<std::uint64_t>(i));
    const int first = row_rng.next_int_1_to_n(spec.n);
    const int second = row_rng.next_int_1_to_n(spec.n);
    const int a = std::min(first, second);
    const int b = std::max(first, second);
    double* row = w.row(i);
    for (int j = a - 1; j <= b - 1; ++j) row[j] = 1.0;
  }
  return w;
}

Matrix gen_wrelated(const WorkloadSpec& spec) {
  spec.validate();
  if (spec.family != WorkloadFamily::kWRelated) {
    throw std::invalid_argument("gen_wrelated: spec family mismatch");
  }
  Matrix base(spec.s, spec.n);  // A
  for (int i = 0; i < spec.s; ++i) {
    SplitMix64 row_rng(spec.seed + static_cast<std::uint64_t>(i));
    double* row = base.row(i);
    for (int j = 0; j < spec.n; ++j) row[j] = row_rng.next_normal();
  }
  Matrix comb(spec.m, spec.s);  // C
  for (int i = 0; i < spec.m; ++i) {
    SplitMix64 row_rng(spec.seed + static_cast<std::uint64_t>(spec.s + i));
    double* row = comb.row(i);
    for (int j = 0; j < spec.s; ++j) row[j] = row_rng.next_normal();
  }
  return comb * base;
}

Matrix generate_workload(const WorkloadSpec& spec) {
  switch (spec.family) {
    case WorkloadFamily::kWDiscrete:
      return gen_wdiscrete(spec);
    case WorkloadFamily::kWRange:
      return gen_wrange(spec);
    case WorkloadFamily::kWRelated:
      return gen_wrelated(spec);
  }
  throw std::logic_error("generate_workload: bad enum value");
}

Dataset merge_domain(const std::vector<double>& counts, int target_n) {
  const int len = static_cast<int>(counts.size());
  if (target_n < 1 || target_n > len) {
    throw std::invalid_argument("merge_domain: target_n = " + std::to_string(target_n) +
                                " not in [1, " + std::to_string(len) + "]");
  }
  const int base = len / target_n;
  const int extra = len % target_n;  // first `extra` buckets take one more
  Dataset out;
  out.counts.resize(target_n);
  int pos = 0;
  for (int b = 0; b < target_n; ++b) {
    const int width = base + (b < extra ? 1 : 0);
    double acc = 0.0;
    for (int k = 0; k < width; ++k) acc += counts[pos + k];
    out.counts[b] = acc;
    pos += width;
  }
  return out;
}

std::vector<double> gen_lognormal_counts(int n, std::uint64_t seed, double mu_log,
                                         double sigma_log) {
  if (n < 1) {
    throw std::invalid_argument("gen_lognormal_counts: n must be >= 1");
  }
  SplitMix64 rng(seed);
  std::vector<double> counts(n);
  for (int i = 0; i < n; ++i) {
    counts[i] = std::exp(mu_log + sigma_log * rng.next_normal());
  }
  return counts;
}

std::vector<double> load_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_counts: cannot open '" + path + "'");
  }
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;  // blank line
    if (line[start] == '#') continue;
    std::istringstream parse(line);
    double v = 0.0;
    if (!(parse >> v)) {
      throw std::runtime_error("load_counts: '" + path + "' line " +
                               std::to_string(line_no) + ": not a number");
    }
    std::string tail;
    if (parse >> tail) {
      throw std::runtime_error("load_counts: '" + path + "' line " +
                               std::to_string(line_no) + ": trailing content '" + tail + "'");
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error("load_counts: '" + path + "' line " +
                               std::to_string(line_no) + ": non-finite value");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw std::runtime_error("load_counts: '" + path + "' contains no values");
  }
  return values;
}

void save_counts(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_counts: cannot open '" + path + "' for writing");
  }
  char buf[40];
  for (double v : values) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
  if (!out) {
    throw std::runtime_error("save_counts: write to '" + path + "' failed");
  }
}

}  // namespace lrmech
