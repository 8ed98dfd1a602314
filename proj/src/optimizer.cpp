#include "dgs/optimizer.hpp"

#include <chrono>
#include <cmath>

#include "dgs/directions.hpp"
#include "dgs/errors.hpp"
#include "dgs/gradient.hpp"
#include "dgs/kernels.hpp"
#include "dgs/quadrature.hpp"
#include "dgs/rng.hpp"

namespace dgs::optimizer {

namespace {

// Salts separating the independent seed streams derived from master_seed.
constexpr std::uint64_t kFrameSalt = 0xF0A;
constexpr std::uint64_t kRadiiSalt = 0x0D11;

void validate_config(const TrainerConfig& c) {
  if (c.quad_order < 1) throw InvalidArgument("config: quad_order must be >= 1");
  if (!(c.trigger_tol > 0.0)) {
    throw InvalidArgument("config: trigger_tol must be > 0");
  }
  if (!(c.radius_mean - c.radius_spread > 0.0)) {
    throw InvalidArgument("config: radius_mean - radius_spread must be > 0");
  }
  if (c.radius_spread < 0.0) {
    throw InvalidArgument("config: radius_spread must be >= 0");
  }
  if (!(c.frame_scale > 0.0)) {
    throw InvalidArgument("config: frame_scale must be > 0");
  }
  if (c.workers < 1) throw InvalidArgument("config: workers must be >= 1");
  if (c.max_iterations < 0) {
    throw InvalidArgument("config: max_iterations must be >= 0");
  }
  if (c.eval_episodes < 1) {
    throw InvalidArgument("config: eval_episodes must be >= 1");
  }
  if (!std::isfinite(c.learning_rate)) {
    throw InvalidArgument("config: learning_rate must be finite");
  }
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

// Reporting rollouts at the current parameters; fills the record's
// mean/min/max fields.
void evaluate_returns(const ObjectiveHandle& f, const std::vector<double>& theta,
                      const TrainerConfig& config, int iteration,
                      IterationRecord& rec) {
  double sum = 0.0, lo = 0.0, hi = 0.0;
  for (int k = 0; k < config.eval_episodes; ++k) {
    std::uint64_t seed =
        rng::seed_hash(config.master_seed, static_cast<std::uint64_t>(iteration),
                       static_cast<std::uint64_t>(k));
    double v = f(theta.data(), static_cast<int>(theta.size()), seed);
    if (k == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sum += v;
  }
  rec.mean_return = sum / config.eval_episodes;
  rec.min_return = lo;
  rec.max_return = hi;
}

}  // namespace

void adam_step(AdamState& state, const std::vector<double>& gradient,
               std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  if (static_cast<int>(gradient.size()) != n) {
    throw InvalidArgument("adam_step: gradient/theta length mismatch");
  }
  if (state.first_moment.empty()) state.first_moment.assign(n, 0.0);
  if (state.second_moment.empty()) state.second_moment.assign(n, 0.0);
  if (static_cast<int>(state.first_moment.size()) != n ||
      static_cast<int>(state.second_moment.size()) != n) {
    throw InvalidArgument("adam_step: state size mismatch");
  }
  for (double g : gradient) {
    if (!std::isfinite(g)) {
      throw NumericalError("adam_step: non-finite gradient entry");
    }
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  kernels::adam_update(n, theta.data(), state.first_moment.data(),
                       state.second_moment.data(), gradient.data(),
                       state.learning_rate, state.beta1, state.beta2,
                       state.epsilon, bc1, bc2);
  for (double x : theta) {
    if (!std::isfinite(x)) {
      throw NumericalError("adam_step: parameters became non-finite");
    }
  }
}

TrainResult dgs_es_train(const ObjectiveHandle& f,
                         const std::vector<double>& theta0,
                         const TrainerConfig& config,
                         scheduler::Evaluator& evaluator) {
  validate_config(config);
  const int d = f.dimension;
  if (static_cast<int>(theta0.size()) != d) {
    throw InvalidArgument("dgs_es_train: theta0 length does not match objective");
  }
  const quadrature::QuadratureRule rule =
      quadrature::build_gauss_hermite(config.quad_order);

  TrainResult result;
  result.theta = theta0;
  result.completed = true;

  directions::DirectionMatrix frame = directions::init_frame(d);
  directions::SmoothingRadii radii;
  radii.values.assign(d, config.radius_mean);

  AdamState state;
  state.learning_rate = config.learning_rate;

  const auto mode = config.compose_frames ? directions::PerturbMode::Compose
                                          : directions::PerturbMode::Replace;
  int since_perturb = 0;

  for (int n = 1; n <= config.max_iterations; ++n) {
    const double t0 = now_ms();
    const std::uint64_t iter_seed =
        rng::seed_hash(config.master_seed, static_cast<std::uint64_t>(n));
    evaluator.broadcast_theta(result.theta);

    gradient::GradientEstimate est;
    bool have_estimate = false;
    std::string last_error;
    for (int attempt = 0; attempt < 2 && !have_estimate; ++attempt) {
      std::uint64_t base_seed =
          rng::seed_hash(iter_seed, static_cast<std::uint64_t>(attempt));
      try {
        auto tasks = scheduler::plan_tasks(result.theta, frame, radii, rule,
                                           base_seed, config.crn_mode);
        auto results = evaluator.execute(tasks, f);
        est = scheduler::reduce_to_gradient(std::move(results), frame, radii,
                                            rule);
        have_estimate = true;
      } catch (const EvaluationError& e) {
        last_error = e.what();
      }
    }
    if (!have_estimate) {
      result.completed = false;
      result.error = "iteration " + std::to_string(n) + ": " + last_error;
      break;
    }

    IterationRecord rec;
    rec.iteration = n;
    rec.evals = est.evaluations_used;
    rec.grad_norm =
        std::sqrt(kernels::dot(d, est.gradient.data(), est.gradient.data()));

    try {
      adam_step(state, est.gradient, result.theta);
    } catch (const NumericalError& e) {
      result.completed = false;
      result.error = "iteration " + std::to_string(n) + ": " + e.what();
      break;
    }

    ++since_perturb;
    bool trigger = rec.grad_norm < config.trigger_tol;
    if (!trigger && config.stagnation_trigger > 0 &&
        since_perturb >= config.stagnation_trigger) {
      trigger = true;
    }
    if (trigger) {
      std::uint64_t frame_seed = rng::seed_hash(config.master_seed, kFrameSalt,
                                                static_cast<std::uint64_t>(n));
      std::uint64_t radii_seed = rng::seed_hash(config.master_seed, kRadiiSalt,
                                                static_cast<std::uint64_t>(n));
      frame = directions::perturb_frame(frame, config.frame_scale, frame_seed,
                                        mode);
      radii = directions::sample_radii(d, config.radius_mean,
                                       config.radius_spread, radii_seed);
      evaluator.on_frame_event(config.frame_scale, frame_seed,
                               config.compose_frames);
      rec.perturbed = true;
      since_perturb = 0;
    }

    evaluate_returns(f, result.theta, config, n, rec);
    rec.wall_ms = config.record_wall_time ? (now_ms() - t0) : 0.0;
    result.history.push_back(rec);
  }
  return result;
}

TrainResult vanilla_es_train(const ObjectiveHandle& f,
                             const std::vector<double>& theta0,
                             const TrainerConfig& config,
                             scheduler::Evaluator& evaluator) {
  validate_config(config);
  const int d = f.dimension;
  if (static_cast<int>(theta0.size()) != d) {
    throw InvalidArgument(
        "vanilla_es_train: theta0 length does not match objective");
  }
  const int samples = config.quad_order * d;  // matched per-iteration budget
  const double sigma = config.radius_mean;

  TrainResult result;
  result.theta = theta0;
  result.completed = true;

  AdamState state;
  state.learning_rate = config.learning_rate;

  std::vector<double> us(static_cast<std::size_t>(samples) * d);
  for (int n = 1; n <= config.max_iterations; ++n) {
    const double t0 = now_ms();
    const std::uint64_t iter_seed =
        rng::seed_hash(config.master_seed, static_cast<std::uint64_t>(n));

    gradient::GradientEstimate est;
    bool have_estimate = false;
    std::string last_error;
    for (int attempt = 0; attempt < 2 && !have_estimate; ++attempt) {
      std::uint64_t base_seed =
          rng::seed_hash(iter_seed, static_cast<std::uint64_t>(attempt));
      try {
        // Draw all perturbations up front (same stream as a serial
        // es_gradient_mc call), fan the evaluations out, then reduce in
        // fixed sample order so the result matches the serial estimator
        // bit-for-bit.
        rng::SplitMix64 gen(base_seed);
        for (double& u : us) u = gen.normal();
        std::vector<scheduler::EvalTask> tasks(samples);
        for (int m = 0; m < samples; ++m) {
          scheduler::EvalTask& t = tasks[m];
          t.id = m;
          t.direction = 0;
          t.node = m;
          t.scale = sigma;
          t.seed = rng::seed_hash(base_seed, static_cast<std::uint64_t>(m));
          t.point.resize(d);
          kernels::scale_add(d, result.theta.data(), sigma,
                             us.data() + static_cast<std::size_t>(m) * d,
                             t.point.data());
        }
        auto results = evaluator.execute(tasks, f);
        est.kind = gradient::EstimatorKind::MonteCarloEs;
        est.gradient.assign(d, 0.0);
        est.evaluations_used = samples;
        for (int m = 0; m < samples; ++m) {
          kernels::axpy(d, results[m].value,
                        us.data() + static_cast<std::size_t>(m) * d,
                        est.gradient.data());
        }
        const double inv = 1.0 / (static_cast<double>(samples) * sigma);
        for (int j = 0; j < d; ++j) est.gradient[j] *= inv;
        have_estimate = true;
      } catch (const EvaluationError& e) {
        last_error = e.what();
      }
    }
    if (!have_estimate) {
      result.completed = false;
      result.error = "iteration " + std::to_string(n) + ": " + last_error;
      break;
    }

    IterationRecord rec;
    rec.iteration = n;
    rec.evals = est.evaluations_used;
    rec.grad_norm =
        std::sqrt(kernels::dot(d, est.gradient.data(), est.gradient.data()));

    try {
      adam_step(state, est.gradient, result.theta);
    } catch (const NumericalError& e) {
      result.completed = false;
      result.error = "iteration " + std::to_string(n) + ": " + e.what();
      break;
    }

    evaluate_returns(f, result.theta, config, n, rec);
    rec.wall_ms = config.record_wall_time ? (now_ms() - t0) : 0.0;
    result.history.push_back(rec);
  }
  return result;
}

}  // namespace dgs::optimizer
