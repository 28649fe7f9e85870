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

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lrmech/bench.hpp"
#include "lrmech/lrm_solver.hpp"
#include "lrmech/matrix.hpp"
#include "lrmech/workload.hpp"

namespace {

int cmd_run(const std::string& plan_path, const std::string& out_path, bool have_seed,
            std::uint64_t seed, bool stable_output, bool full_scale) {
  try {
    lrmech::ExperimentPlan plan = lrmech::parse_plan(plan_path);
    if (have_seed) {
      plan.seed = seed;
    }
    plan.stable_output = stable_output;
    plan.full_scale = full_scale;
    std::string out = out_path.empty() ? plan.output : out_path;
    if (out.empty()) {
      throw lrmech::PlanError(
          "no output path: pass --out or set 'output' in the plan");
    }
    const std::vector<lrmech::ResultRow> rows = lrmech::run_plan(plan);
    lrmech::emit_csv(rows, out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
    return 0;
  } catch (const lrmech::PlanError& e) {
    std::cerr << "plan error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_decompose(const std::string& workload_path, int r, double gamma,
                  const std::string& out_dir) {
  try {
    const lrmech::Matrix w = lrmech::load_matrix(workload_path);
    lrmech::SolverConfig cfg;
    cfg.r = r;
    cfg.gamma = gamma;
    auto [dec, trace] = lrmech::decompose(w, cfg);
    lrmech::save_decomposition(out_dir, dec, gamma, cfg.seed, trace.termination);
    std::cout << "wrote " << out_dir << " (r = " << dec.r()
              << ", residual = " << dec.residual << ", termination = "
              << trace.termination << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_gen(const std::string& family, int m, int n, int s, std::uint64_t seed,
            const std::string& out_path) {
  try {
    lrmech::WorkloadSpec spec;
    spec.family = lrmech::family_from_name(family);
    spec.m = m;
    spec.n = n;
    spec.s = s;
    spec.seed = seed;
    spec.validate();
    const lrmech::Matrix w = lrmech::generate_workload(spec);
    lrmech::save_matrix(out_path, w);
    std::cout << "wrote " << w.rows() << " x " << w.cols() << " workload to "
              << out_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private linear counting queries: baselines, "
               "workload decomposition, and an experiment harness"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute an experiment plan and write a CSV");
  std::string plan_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool stable_output = false;
  bool full_scale = false;
  run->add_option("--plan", plan_path, "Experiment plan file")->required();
  run->add_option("--out", out_path, "Output CSV path (overrides the plan's 'output')");
  auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides the plan)");
  run->add_flag("--stable-output", stable_output,
                "Zero the wall-time column so outputs compare byte-for-byte");
  run->add_flag("--full", full_scale,
                "Allow domain sizes past n = 1024 / m = 256 (slow)");

  auto* decompose = app.add_subcommand("decompose", "Factor a workload and save B, L");
  std::string workload_path;
  std::string out_dir;
  int r = 0;
  double gamma = 0.01;
  decompose->add_option("--workload", workload_path, "Workload matrix file")->required();
  decompose->add_option("--r", r, "Decomposition rank (0 = automatic)")->required();
  decompose->add_option("--gamma", gamma, "Relative residual target")->required();
  decompose->add_option("--out", out_dir, "Output directory")->required();

  auto* gen = app.add_subcommand("gen", "Generate a synthetic workload matrix");
  std::string family;
  int m = 0;
  int n = 0;
  int s = 1;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--family", family, "wdiscrete, wrange or wrelated")->required();
  gen->add_option("--m", m, "Query count (rows)")->required();
  gen->add_option("--n", n, "Domain size (columns)")->required();
  gen->add_option("--s", s, "Base-query count (wrelated only)");
  gen->add_option("--seed", gen_seed, "Generator seed")->required();
  gen->add_option("--out", gen_out, "Output matrix file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (run->parsed()) {
    return cmd_run(plan_path, out_path, seed_opt->count() > 0, seed, stable_output,
                   full_scale);
  }
  if (decompose->parsed()) {
    return cmd_decompose(workload_path, r, gamma, out_dir);
  }
  if (gen->parsed()) {
    return cmd_gen(family, m, n, s, gen_seed, gen_out);
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
