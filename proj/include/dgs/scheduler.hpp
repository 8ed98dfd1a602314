#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgs/directions.hpp"
#include "dgs/gradient.hpp"
#include "dgs/objective.hpp"
#include "dgs/quadrature.hpp"

namespace dgs::scheduler {

// One objective evaluation at a quadrature point. `id` is direction*order +
// node, so ascending id order equals the row-major (direction, node) order of
// the serial estimator. `point` is materialized for in-process execution;
// process workers rebuild it locally from (direction, scale) plus the
// broadcast parameters and verify it against `checksum` (FNV-1a over the
// point's raw bytes).
struct EvalTask {
  long long id = 0;
  int direction = 0;
  int node = 0;
  double scale = 0.0;  // (sqrt(2) * sigma_direction) * node_value
  std::uint64_t seed = 0;
  std::vector<double> point;
};

struct EvalResult {
  long long id = 0;
  double value = 0.0;
  double wall_ms = 0.0;
};

// All order*dim evaluation points for one gradient estimate, row-major over
// (direction, node), with the same derived seeds the serial estimator uses.
std::vector<EvalTask> plan_tasks(const std::vector<double>& theta,
                                 const directions::DirectionMatrix& frame,
                                 const directions::SmoothingRadii& radii,
                                 const quadrature::QuadratureRule& rule,
                                 std::uint64_t base_seed,
                                 bool common_random_numbers = false);

// Pluggable execution backend. broadcast_theta/on_frame_event exist so
// process backends can mirror the master's parameters and frame without ever
// shipping vectors per task; the in-process backend ignores them.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual int workers() const = 0;
  virtual void broadcast_theta(const std::vector<double>& theta) = 0;
  virtual void on_frame_event(double alpha, std::uint64_t seed, bool compose) = 0;
  // Evaluates every task and returns results sorted by task id, identical
  // for any worker count. A task whose evaluation throws is retried once (on
  // a different execution context); a second failure raises an evaluation
  // error carrying the task id.
  virtual std::vector<EvalResult> execute(const std::vector<EvalTask>& tasks,
                                          const ObjectiveHandle& f) = 0;
};

// L logical workers as threads; tasks are split into contiguous blocks of
// size floor(n/L), the remainder going one-each to the lowest-index workers.
class ThreadPoolEvaluator : public Evaluator {
 public:
  explicit ThreadPoolEvaluator(int workers);
  int workers() const override { return workers_; }
  void broadcast_theta(const std::vector<double>&) override {}
  void on_frame_event(double, std::uint64_t, bool) override {}
  std::vector<EvalResult> execute(const std::vector<EvalTask>& tasks,
                                  const ObjectiveHandle& f) override;

 private:
  int workers_ = 1;
};

// L worker processes speaking a line protocol over pipes; only scalars and
// the theta broadcast cross the process boundary. A dead or erroring worker's
// tasks are retried once in-process before giving up.
class ProcessPoolEvaluator : public Evaluator {
 public:
  // worker_binary is execed as: <worker_binary> worker
  ProcessPoolEvaluator(int workers, std::string worker_binary,
                       std::string objective_spec);
  ~ProcessPoolEvaluator() override;
  int workers() const override { return static_cast<int>(procs_.size()); }
  void broadcast_theta(const std::vector<double>& theta) override;
  void on_frame_event(double alpha, std::uint64_t seed, bool compose) override;
  std::vector<EvalResult> execute(const std::vector<EvalTask>& tasks,
                                  const ObjectiveHandle& f) override;

 private:
  struct Proc {
    int pid = -1;
    int to_child = -1;    // write end
    int from_child = -1;  // read end
    bool alive = false;
    std::string rdbuf;
  };
  bool send_line(Proc& p, const std::string& line);
  bool read_line(Proc& p, std::string& line);
  void shutdown();

  std::vector<Proc> procs_;
};

// Fixed-order reduction of a complete, sorted-or-sortable result set to the
// gradient estimate; shares the accumulation code with the serial estimator
// so the two are bit-identical. Missing or duplicate ids raise an evaluation
// error naming the offending id.
gradient::GradientEstimate reduce_to_gradient(
    std::vector<EvalResult> results, const directions::DirectionMatrix& frame,
    const directions::SmoothingRadii& radii,
    const quadrature::QuadratureRule& rule);

// Wire helpers shared with the worker process implementation.
std::string double_to_hex(double x);       // 16 hex digits of the IEEE bits
double hex_to_double(const std::string&);  // inverse of double_to_hex
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t point_checksum(const std::vector<double>& point);

}  // namespace dgs::scheduler
