#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgs/objective.hpp"
#include "dgs/scheduler.hpp"

namespace dgs::optimizer {

// Adam accumulator (ascent convention: theta moves along +gradient).
struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long long step_count = 0;
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainerConfig {
  int quad_order = 7;          // nodes per direction (M)
  double frame_scale = 2.0;    // skew-perturbation entry bound (alpha)
  double radius_mean = 1.0;    // smoothing radius center (r)
  double radius_spread = 0.2;  // radius resampling half-width (beta)
  double trigger_tol = 0.01;   // gradient-norm perturbation trigger
  double learning_rate = 0.1;
  int max_iterations = 100;
  int workers = 1;
  std::uint64_t master_seed = 0;
  bool crn_mode = false;     // one shared evaluation seed per iteration
  int eval_episodes = 10;    // reporting rollouts per iteration
  bool compose_frames = false;  // compose perturbations instead of replacing
  // Optional extra trigger: also perturb after this many iterations without
  // one (0 disables; the gradient-norm trigger is always active).
  int stagnation_trigger = 0;
  // When false (default) wall_ms is recorded as 0 so artifacts are
  // byte-identical across reruns.
  bool record_wall_time = false;
};

struct IterationRecord {
  int iteration = 0;  // 1-based
  double mean_return = 0.0;
  double min_return = 0.0;
  double max_return = 0.0;
  double grad_norm = 0.0;
  long long evals = 0;
  bool perturbed = false;
  double wall_ms = 0.0;
};

struct TrainResult {
  std::vector<double> theta;
  std::vector<IterationRecord> history;  // one record per completed iteration
  bool completed = false;
  std::string error;  // set when completed == false
};

// In-place Adam update with bias correction; increments state.step_count and
// lazily initializes the moment vectors. Non-finite gradient entries (or a
// non-finite updated theta) raise a numerical error.
void adam_step(AdamState& state, const std::vector<double>& gradient,
               std::vector<double>& theta);

// Smoothed-gradient ascent: per iteration, estimate the gradient over the
// current frame/radii through the evaluator, take an Adam step, and if the
// gradient norm fell below trigger_tol regenerate the frame and radii. A
// failed gradient estimate is retried once with fresh derived seeds; a second
// failure stops training with the partial history and the error message.
TrainResult dgs_es_train(const ObjectiveHandle& f,
                         const std::vector<double>& theta0,
                         const TrainerConfig& config,
                         scheduler::Evaluator& evaluator);

// Matched-budget Monte-Carlo baseline: same loop shape, gradient from
// quad_order * dim isotropic Gaussian samples (scalar radius_mean), no
// frame/radius machinery.
TrainResult vanilla_es_train(const ObjectiveHandle& f,
                             const std::vector<double>& theta0,
                             const TrainerConfig& config,
                             scheduler::Evaluator& evaluator);

}  // namespace dgs::optimizer
