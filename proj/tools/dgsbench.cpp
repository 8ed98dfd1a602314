// dgsbench: benchmark runner for the smoothed-gradient evolution-strategy
// optimizer. Runs multi-seed trainings on classic-control tasks or synthetic
// objectives, writes per-seed CSV histories, an aggregate CSV, and plots.
// `dgsbench worker` turns the process into an evaluation worker speaking the
// line protocol on stdin/stdout (used by the process execution backend).
//
// Exit codes: 0 success, 1 runtime failure (partial artifacts + error.log),
// 2 usage/configuration error.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dgs/errors.hpp"
#include "dgs/harness.hpp"
#include "dgs/worker.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (text.find(',') != std::string::npos) {
    // Explicit list: "3,7,9" trains exactly these master seeds.
    std::size_t start = 0;
    while (true) {
      std::size_t pos = text.find(',', start);
      std::string item = pos == std::string::npos
                             ? text.substr(start)
                             : text.substr(start, pos - start);
      seeds.push_back(std::stoull(item));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    return seeds;
  }
  // Single integer N: N trials with master seeds 1..N.
  std::uint64_t n = std::stoull(text);
  if (n == 0) throw dgs::InvalidArgument("--seeds: count must be >= 1");
  for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
  return seeds;
}

std::vector<double> parse_radius_list(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(',', start);
    std::string item = pos == std::string::npos ? text.substr(start)
                                                : text.substr(start, pos - start);
    values.push_back(std::stod(item));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return values;
}

// Initial parameters for every radius of a sweep derive from this seed, so
// all sweep runs share their per-trial starting point.
constexpr std::uint64_t kSweepInitSeed = 1000003;

}  // namespace

int main(int argc, char** argv) {
  if (argc >= 2 && std::string(argv[1]) == "worker") {
    std::ios::sync_with_stdio(false);
    return dgs::worker::run_worker(std::cin, std::cout);
  }

  CLI::App app{
      "dgsbench - smoothed-gradient evolution-strategy benchmark runner\n"
      "(run 'dgsbench worker' to serve evaluations over stdin/stdout)"};

  std::string task, algo, out_dir, backend, seeds_text, sweep_text, config_path;
  int order = 0, iters = 0, workers = 0, eval_episodes = 0, hidden = 0,
      stagnation = 0;
  double radius = 0.0, spread = 0.0, alpha = 0.0, trigger_tol = 0.0, lr = 0.0;
  bool crn = false, compose = false, walltime = false;

  app.add_option("--task", task,
                 "cartpole | mountaincar | pendulum | sphere | quadratic | "
                 "multimodal");
  app.add_option("--algo", algo, "dgs-es | vanilla-es (default dgs-es)");
  app.add_option("--order", order, "quadrature nodes per direction (default 7)");
  app.add_option("--radius", radius, "smoothing radius mean r (default 1.0)");
  app.add_option("--spread", spread, "radius resampling half-width (default 0.2)");
  app.add_option("--alpha", alpha, "frame perturbation scale (default 2.0)");
  app.add_option("--trigger-tol", trigger_tol,
                 "gradient-norm perturbation trigger (default 0.01)");
  app.add_option("--lr", lr, "Adam learning rate (default 0.1)");
  app.add_option("--iters", iters, "training iterations (default 100)");
  app.add_option("--workers", workers, "evaluation workers (default 1)");
  app.add_option("--seeds", seeds_text,
                 "seed count N (trains seeds 1..N) or explicit list s1,s2,...");
  app.add_flag("--crn", crn,
               "common random numbers: one shared evaluation seed per iteration");
  app.add_option("--out", out_dir, "output directory (default ./out)");
  app.add_option("--sweep", sweep_text,
                 "comma-separated radius values; runs the radius sweep with "
                 "shared per-seed initialization");
  app.add_option("--config", config_path,
                 "load a 'dgsbench-config 1' file (explicit flags override it)");
  app.add_option("--backend", backend,
                 "thread | process evaluation backend (default thread)");
  app.add_option("--eval-episodes", eval_episodes,
                 "reporting rollouts per iteration (default 10)");
  app.add_option("--hidden", hidden, "policy hidden units (default 16)");
  app.add_flag("--compose-frames", compose,
               "compose frame perturbations instead of replacing the frame");
  app.add_flag("--record-walltime", walltime,
               "record wall_ms per iteration (off keeps reruns byte-identical)");
  app.add_option("--stagnation-trigger", stagnation,
                 "also perturb after this many iterations without one (0 off)");
  app.add_subcommand("worker",
                     "serve evaluation requests on stdin/stdout (line protocol)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    dgs::harness::ExperimentConfig cfg;
    std::vector<double> sweep_values;
    if (app.count("--config")) {
      dgs::harness::apply_config_file(config_path, cfg, sweep_values);
    }
    if (app.count("--task")) cfg.task = task;
    if (app.count("--algo")) cfg.algo = algo;
    if (app.count("--order")) cfg.trainer.quad_order = order;
    if (app.count("--radius")) cfg.trainer.radius_mean = radius;
    if (app.count("--spread")) cfg.trainer.radius_spread = spread;
    if (app.count("--alpha")) cfg.trainer.frame_scale = alpha;
    if (app.count("--trigger-tol")) cfg.trainer.trigger_tol = trigger_tol;
    if (app.count("--lr")) cfg.trainer.learning_rate = lr;
    if (app.count("--iters")) cfg.trainer.max_iterations = iters;
    if (app.count("--workers")) cfg.trainer.workers = workers;
    if (app.count("--seeds")) cfg.seeds = parse_seeds(seeds_text);
    if (app.count("--crn")) cfg.trainer.crn_mode = crn;
    if (app.count("--out")) cfg.out_dir = out_dir;
    if (app.count("--backend")) cfg.backend = backend;
    if (app.count("--eval-episodes")) cfg.trainer.eval_episodes = eval_episodes;
    if (app.count("--hidden")) cfg.hidden_dim = hidden;
    if (app.count("--compose-frames")) cfg.trainer.compose_frames = compose;
    if (app.count("--record-walltime")) cfg.trainer.record_wall_time = walltime;
    if (app.count("--stagnation-trigger")) {
      cfg.trainer.stagnation_trigger = stagnation;
    }
    if (app.count("--sweep")) sweep_values = parse_radius_list(sweep_text);

    if (!sweep_values.empty()) {
      return dgs::harness::run_sigma_sweep(cfg, sweep_values, kSweepInitSeed);
    }
    return dgs::harness::run_experiment(cfg);
  } catch (const dgs::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
