#include "dgs/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "dgs/envs.hpp"
#include "dgs/errors.hpp"
#include "dgs/objectives.hpp"
#include "dgs/plot.hpp"
#include "dgs/rng.hpp"
#include "dgs/scheduler.hpp"

namespace dgs::harness {

namespace {

constexpr char kCsvHeader[] =
    "iteration,mean_return,min_return,max_return,grad_norm,evals,perturbed,"
    "wall_ms";

// Salt separating initial-parameter draws from every training seed stream.
constexpr std::uint64_t kInitSalt = 0x1417;

const std::vector<std::string>& valid_tasks() {
  static const std::vector<std::string> tasks = {
      "cartpole", "mountaincar", "pendulum", "sphere", "quadratic",
      "multimodal"};
  return tasks;
}

std::string valid_task_list() {
  std::string s;
  for (const std::string& t : valid_tasks()) {
    if (!s.empty()) s += ", ";
    s += t;
  }
  return s;
}

void validate(const ExperimentConfig& config) {
  if (std::find(valid_tasks().begin(), valid_tasks().end(), config.task) ==
      valid_tasks().end()) {
    throw InvalidArgument("unknown task '" + config.task +
                          "' (valid: " + valid_task_list() + ")");
  }
  if (config.algo != "dgs-es" && config.algo != "vanilla-es") {
    throw InvalidArgument("unknown algorithm '" + config.algo +
                          "' (valid: dgs-es, vanilla-es)");
  }
  if (config.backend != "thread" && config.backend != "process") {
    throw InvalidArgument("unknown backend '" + config.backend +
                          "' (valid: thread, process)");
  }
  if (config.seeds.empty()) throw InvalidArgument("seeds must be non-empty");
  std::set<std::uint64_t> uniq(config.seeds.begin(), config.seeds.end());
  if (uniq.size() != config.seeds.size()) {
    throw InvalidArgument("seeds must be distinct");
  }
  if (config.hidden_dim < 1) throw InvalidArgument("hidden must be >= 1");
  if (config.out_dir.empty()) throw InvalidArgument("output directory is empty");
}

std::unique_ptr<scheduler::Evaluator> make_evaluator(
    const ExperimentConfig& config, const ObjectiveHandle& f) {
  if (config.backend == "process") {
    std::string bin = config.worker_binary;
    if (bin.empty()) bin = "/proc/self/exe";
    return std::make_unique<scheduler::ProcessPoolEvaluator>(
        config.trainer.workers, bin, f.spec_string);
  }
  return std::make_unique<scheduler::ThreadPoolEvaluator>(
      config.trainer.workers);
}

void write_error_log(const std::string& out_dir, const std::string& message) {
  std::ofstream f(out_dir + "/error.log");
  f << message << "\n";
}

plot::BandSeries aggregate_series(
    const std::string& label,
    const std::vector<std::vector<optimizer::IterationRecord>>& histories) {
  plot::BandSeries s;
  s.label = label;
  if (histories.empty()) return s;
  std::size_t len = histories[0].size();
  for (const auto& h : histories) len = std::min(len, h.size());
  for (std::size_t k = 0; k < len; ++k) {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < histories.size(); ++j) {
      double v = histories[j][k].mean_return;
      if (j == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      sum += v;
    }
    s.xs.push_back(static_cast<double>(histories[0][k].iteration));
    s.mean.push_back(sum / static_cast<double>(histories.size()));
    s.lo.push_back(lo);
    s.hi.push_back(hi);
  }
  return s;
}

// Shared by run_experiment and the per-radius sweep runs. theta0_for must
// yield the initial parameters for a given seed. Returns 0/1 and fills
// histories for completed seeds.
int run_trainings(
    const ExperimentConfig& config, const ObjectiveHandle& objective,
    const std::function<std::vector<double>(std::uint64_t)>& theta0_for,
    const std::string& out_dir,
    std::vector<std::vector<optimizer::IterationRecord>>& histories) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  for (std::uint64_t seed : config.seeds) {
    optimizer::TrainerConfig tc = config.trainer;
    tc.master_seed = seed;
    std::vector<double> theta0 = theta0_for(seed);
    auto evaluator = make_evaluator(config, objective);
    optimizer::TrainResult result;
    std::string failure;
    try {
      if (config.algo == "dgs-es") {
        result = optimizer::dgs_es_train(objective, theta0, tc, *evaluator);
      } else {
        result = optimizer::vanilla_es_train(objective, theta0, tc, *evaluator);
      }
      if (!result.completed) failure = result.error;
    } catch (const std::exception& e) {
      failure = e.what();
    }
    std::string csv = out_dir + "/seed_" + std::to_string(seed) + ".csv";
    write_history_csv(csv, result.history);
    if (!failure.empty()) {
      write_error_log(out_dir, "seed " + std::to_string(seed) + ": " + failure);
      return 1;
    }
    histories.push_back(result.history);
  }

  write_aggregate_csv(out_dir + "/aggregate.csv", histories);
  return 0;
}

std::string format_radius(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_history_csv(const std::string& path,
                       const std::vector<optimizer::IterationRecord>& history) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("write_history_csv: cannot open " + path);
  f << kCsvHeader << "\n";
  for (const auto& rec : history) {
    f << rec.iteration << ',' << format_double(rec.mean_return) << ','
      << format_double(rec.min_return) << ',' << format_double(rec.max_return)
      << ',' << format_double(rec.grad_norm) << ',' << rec.evals << ','
      << (rec.perturbed ? 1 : 0) << ',' << format_double(rec.wall_ms) << "\n";
  }
  if (!f) throw InvalidArgument("write_history_csv: write failed for " + path);
}

std::vector<optimizer::IterationRecord> read_history_csv(
    const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("read_history_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line != kCsvHeader) {
    throw InvalidArgument("read_history_csv: bad header in " + path);
  }
  std::vector<optimizer::IterationRecord> history;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        cols.push_back(line.substr(start));
        break;
      }
      cols.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (cols.size() != 8) {
      throw InvalidArgument("read_history_csv: bad row in " + path);
    }
    optimizer::IterationRecord rec;
    rec.iteration = std::stoi(cols[0]);
    rec.mean_return = std::stod(cols[1]);
    rec.min_return = std::stod(cols[2]);
    rec.max_return = std::stod(cols[3]);
    rec.grad_norm = std::stod(cols[4]);
    rec.evals = std::stoll(cols[5]);
    rec.perturbed = cols[6] == "1";
    rec.wall_ms = std::stod(cols[7]);
    history.push_back(rec);
  }
  return history;
}

void write_aggregate_csv(
    const std::string& path,
    const std::vector<std::vector<optimizer::IterationRecord>>& histories) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("write_aggregate_csv: cannot open " + path);
  f << "iteration,mean_return,min_return,max_return\n";
  if (histories.empty()) return;
  std::size_t len = histories[0].size();
  for (const auto& h : histories) len = std::min(len, h.size());
  for (std::size_t k = 0; k < len; ++k) {
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < histories.size(); ++j) {
      double v = histories[j][k].mean_return;
      if (j == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      sum += v;
    }
    f << histories[0][k].iteration << ','
      << format_double(sum / static_cast<double>(histories.size())) << ','
      << format_double(lo) << ',' << format_double(hi) << "\n";
  }
}

ObjectiveHandle make_objective(const std::string& task, int hidden_dim) {
  if (task == "cartpole") {
    return envs::env_objective(envs::EnvId::CartPole, hidden_dim);
  }
  if (task == "mountaincar") {
    return envs::env_objective(envs::EnvId::MountainCarContinuous, hidden_dim);
  }
  if (task == "pendulum") {
    return envs::env_objective(envs::EnvId::Pendulum, hidden_dim);
  }
  if (task == "sphere") {
    return objectives::synthetic_objective(objectives::Kind::Sphere, 20);
  }
  if (task == "quadratic") {
    return objectives::synthetic_objective(objectives::Kind::ShiftedQuadratic,
                                           20);
  }
  if (task == "multimodal") {
    return objectives::synthetic_objective(objectives::Kind::Multimodal2d, 2);
  }
  throw InvalidArgument("unknown task '" + task +
                        "' (valid: " + valid_task_list() + ")");
}

std::vector<double> initial_theta(const std::string& task, int hidden_dim,
                                  std::uint64_t seed) {
  const std::uint64_t draw_seed = rng::seed_hash(seed, kInitSalt);
  if (task == "cartpole" || task == "mountaincar" || task == "pendulum") {
    envs::EnvSpec spec = envs::env_by_name(task);
    return policy::init_params(envs::policy_for(spec, hidden_dim), draw_seed);
  }
  rng::SplitMix64 gen(draw_seed);
  if (task == "sphere" || task == "quadratic") {
    std::vector<double> theta(20);
    for (double& x : theta) x = gen.uniform(-1.0, 1.0);
    return theta;
  }
  if (task == "multimodal") {
    std::vector<double> theta(2);
    for (double& x : theta) x = gen.uniform(-0.05, 0.05);
    return theta;
  }
  throw InvalidArgument("unknown task '" + task +
                        "' (valid: " + valid_task_list() + ")");
}

int run_experiment(const ExperimentConfig& config) {
  validate(config);
  ObjectiveHandle objective = make_objective(config.task, config.hidden_dim);
  std::vector<std::vector<optimizer::IterationRecord>> histories;
  int status = run_trainings(
      config, objective,
      [&](std::uint64_t seed) {
        return initial_theta(config.task, config.hidden_dim, seed);
      },
      config.out_dir, histories);
  if (status != 0) return status;

  plot::BandSeries series =
      aggregate_series(config.task + " " + config.algo, histories);
  plot::write_band_plot(config.out_dir + "/plot.png",
                        config.task + " " + config.algo, "iteration",
                        "return", {series});
  return 0;
}

int run_sigma_sweep(const ExperimentConfig& base,
                    const std::vector<double>& r_values,
                    std::uint64_t shared_init_seed) {
  validate(base);
  if (r_values.empty()) {
    throw InvalidArgument("sweep requires at least one radius value");
  }
  for (double r : r_values) {
    if (!(r > 0.0)) throw InvalidArgument("sweep radii must be > 0");
  }
  namespace fs = std::filesystem;
  fs::create_directories(base.out_dir);

  ObjectiveHandle objective = make_objective(base.task, base.hidden_dim);
  // The same per-seed starting point for every radius: derived from the
  // shared init seed, never from r.
  auto theta0_for = [&](std::uint64_t seed) {
    return initial_theta(base.task, base.hidden_dim,
                         rng::seed_hash(shared_init_seed, seed));
  };

  std::ofstream checks(base.out_dir + "/sweep_init_checksums.txt");
  std::vector<plot::BandSeries> overlay;
  for (double r : r_values) {
    ExperimentConfig cfg = base;
    cfg.trainer.radius_mean = r;
    cfg.trainer.radius_spread = 0.2 * r;
    std::string sub = base.out_dir + "/r" + format_radius(r);
    for (std::uint64_t seed : cfg.seeds) {
      std::vector<double> theta0 = theta0_for(seed);
      checks << "r=" << format_radius(r) << " seed=" << seed << " checksum="
             << scheduler::fnv1a64(theta0.data(),
                                   theta0.size() * sizeof(double))
             << "\n";
    }
    std::vector<std::vector<optimizer::IterationRecord>> histories;
    int status = run_trainings(cfg, objective, theta0_for, sub, histories);
    if (status != 0) return status;
    overlay.push_back(aggregate_series("r=" + format_radius(r), histories));
  }
  plot::write_band_plot(base.out_dir + "/sweep.png",
                        base.task + " radius sweep", "iteration", "return",
                        overlay);
  return 0;
}

void apply_config_file(const std::string& path, ExperimentConfig& config,
                       std::vector<double>& sweep_values) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config file " + path);
  std::string line;
  if (!std::getline(f, line) || line != "dgsbench-config 1") {
    throw InvalidArgument("config file must start with 'dgsbench-config 1'");
  }
  auto parse_bool = [&](const std::string& v, const std::string& key) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw InvalidArgument("config key '" + key + "': expected a boolean");
  };
  auto parse_list = [](const std::string& v) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = v.find(',', start);
      if (pos == std::string::npos) {
        items.push_back(v.substr(start));
        break;
      }
      items.push_back(v.substr(start, pos - start));
      start = pos + 1;
    }
    return items;
  };

  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key, value;
    if (!(ls >> key)) continue;  // blank line
    if (!(ls >> value)) {
      throw InvalidArgument("config line " + std::to_string(lineno) +
                            ": key '" + key + "' has no value");
    }
    try {
      if (key == "task") {
        config.task = value;
      } else if (key == "algo") {
        config.algo = value;
      } else if (key == "order") {
        config.trainer.quad_order = std::stoi(value);
      } else if (key == "radius") {
        config.trainer.radius_mean = std::stod(value);
      } else if (key == "spread") {
        config.trainer.radius_spread = std::stod(value);
      } else if (key == "alpha") {
        config.trainer.frame_scale = std::stod(value);
      } else if (key == "trigger-tol") {
        config.trainer.trigger_tol = std::stod(value);
      } else if (key == "lr") {
        config.trainer.learning_rate = std::stod(value);
      } else if (key == "iters") {
        config.trainer.max_iterations = std::stoi(value);
      } else if (key == "workers") {
        config.trainer.workers = std::stoi(value);
      } else if (key == "eval-episodes") {
        config.trainer.eval_episodes = std::stoi(value);
      } else if (key == "hidden") {
        config.hidden_dim = std::stoi(value);
      } else if (key == "crn") {
        config.trainer.crn_mode = parse_bool(value, key);
      } else if (key == "compose-frames") {
        config.trainer.compose_frames = parse_bool(value, key);
      } else if (key == "record-walltime") {
        config.trainer.record_wall_time = parse_bool(value, key);
      } else if (key == "stagnation-trigger") {
        config.trainer.stagnation_trigger = std::stoi(value);
      } else if (key == "out") {
        config.out_dir = value;
      } else if (key == "backend") {
        config.backend = value;
      } else if (key == "seeds") {
        config.seeds.clear();
        for (const std::string& item : parse_list(value)) {
          config.seeds.push_back(std::stoull(item));
        }
      } else if (key == "sweep") {
        sweep_values.clear();
        for (const std::string& item : parse_list(value)) {
          sweep_values.push_back(std::stod(item));
        }
      } else {
        throw InvalidArgument("config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
      }
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception&) {
      throw InvalidArgument("config line " + std::to_string(lineno) +
                            ": bad value for key '" + key + "'");
    }
  }
}

}  // namespace dgs::harness
