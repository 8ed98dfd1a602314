#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgs/objective.hpp"
#include "dgs/optimizer.hpp"

namespace dgs::harness {

// Full experiment description. Valid tasks: cartpole, mountaincar, pendulum
// (policy search) and sphere, quadratic, multimodal (synthetic, d = 20, 20,
// 2). Valid algorithms: dgs-es, vanilla-es.
struct ExperimentConfig {
  std::string task = "cartpole";
  std::string algo = "dgs-es";
  optimizer::TrainerConfig trainer;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "out";
  int hidden_dim = 16;
  std::string backend = "thread";  // "thread" or "process"
  std::string worker_binary;       // process backend: binary execed as "... worker"
};

// One training per seed (sequential); writes seed_<s>.csv per seed,
// aggregate.csv, and plot.png under out_dir. Returns 0 on success, 1 on a
// runtime failure (partial artifacts plus error.log are left on disk).
// Invalid configurations throw an invalid-argument error (usage error).
int run_experiment(const ExperimentConfig& config);

// One run_experiment-style training per radius value, every run starting
// from the same per-seed parameters (derived from shared_init_seed, not from
// the radius). Writes r<value>/... per radius, an overlay plot sweep.png,
// and sweep_init_checksums.txt recording the shared-initialization proof.
// The spread scales with the radius (0.2 * r).
int run_sigma_sweep(const ExperimentConfig& base,
                    const std::vector<double>& r_values,
                    std::uint64_t shared_init_seed);

// "%.17g" — round-trip-exact formatting used for all CSV reals.
std::string format_double(double v);

// Exact header: iteration,mean_return,min_return,max_return,grad_norm,evals,
// perturbed,wall_ms
void write_history_csv(const std::string& path,
                       const std::vector<optimizer::IterationRecord>& history);
std::vector<optimizer::IterationRecord> read_history_csv(
    const std::string& path);

// Per-iteration mean/min/max of the per-seed mean_return columns, truncated
// to the shortest history. Header: iteration,mean_return,min_return,max_return
void write_aggregate_csv(
    const std::string& path,
    const std::vector<std::vector<optimizer::IterationRecord>>& histories);

// Objective for a task name (see ExperimentConfig); throws invalid-argument
// listing the valid names for unknown tasks.
ObjectiveHandle make_objective(const std::string& task, int hidden_dim);

// Deterministic initial parameters for (task, seed): network init for
// policy-search tasks, U[-1,1]^d for sphere/quadratic, U[-0.05,0.05]^2 for
// multimodal.
std::vector<double> initial_theta(const std::string& task, int hidden_dim,
                                  std::uint64_t seed);

// Plain-text config: first line "dgsbench-config 1", then "key value" lines
// (keys mirror the CLI flags; '#' starts a comment). Unknown keys or a bad
// version line throw invalid-argument errors.
void apply_config_file(const std::string& path, ExperimentConfig& config,
                       std::vector<double>& sweep_values);

}  // namespace dgs::harness
