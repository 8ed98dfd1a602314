#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dgs/directions.hpp"
#include "dgs/errors.hpp"
#include "dgs/gradient.hpp"
#include "dgs/objectives.hpp"
#include "dgs/quadrature.hpp"
#include "dgs/rng.hpp"
#include "dgs/scheduler.hpp"
#include "dgs/worker.hpp"

using namespace dgs;
using namespace dgs::scheduler;

namespace {

// Deterministic noisy objective shared by the equivalence checks: smooth in
// theta, with seed-keyed noise so any seed mix-up changes the bits.
ObjectiveHandle noisy_objective(int dim) {
  ObjectiveHandle f;
  f.dimension = dim;
  f.spec_string = "test-noisy";
  f.evaluate = [](const double* x, int n, std::uint64_t seed) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::sin(x[i]) - 0.05 * x[i] * x[i];
    rng::SplitMix64 gen(seed);
    return s + 0.01 * gen.normal();
  };
  return f;
}

struct Setup {
  std::vector<double> theta;
  directions::DirectionMatrix frame;
  directions::SmoothingRadii radii;
  quadrature::QuadratureRule rule;
  std::uint64_t base_seed = 90210;
};

Setup make_setup(int d, int order) {
  Setup s;
  s.theta.assign(d, 0.0);
  rng::SplitMix64 gen(17);
  for (double& v : s.theta) v = gen.uniform(-0.5, 0.5);
  s.frame = directions::perturb_frame(directions::init_frame(d), 2.0, 3);
  s.radii = directions::sample_radii(d, 1.0, 0.2, 4);
  s.rule = quadrature::build_gauss_hermite(order);
  return s;
}

}  // namespace

TEST_CASE("plan_tasks mirrors the serial estimator's layout and seeds") {
  const int d = 6, order = 7;
  Setup s = make_setup(d, order);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);
  REQUIRE(tasks.size() == static_cast<std::size_t>(d * order));

  for (int i = 0; i < d; ++i) {
    for (int m = 0; m < order; ++m) {
      const EvalTask& t = tasks[static_cast<std::size_t>(i) * order + m];
      CHECK(t.id == static_cast<long long>(i) * order + m);
      CHECK(t.direction == i);
      CHECK(t.node == m);
      CHECK(t.scale == gradient::node_scale(s.radii.values[i], s.rule.nodes[m]));
      CHECK(t.seed == gradient::node_seed(s.base_seed, i, m));
      REQUIRE(t.point.size() == static_cast<std::size_t>(d));
      // Center node of an odd-order rule sits exactly at theta.
      if (m == (order - 1) / 2) CHECK(t.point == s.theta);
    }
  }

  auto crn = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed, true);
  for (const EvalTask& t : crn) CHECK(t.seed == s.base_seed);

  directions::SmoothingRadii bad;
  bad.values = {1.0};
  CHECK_THROWS_AS(plan_tasks(s.theta, s.frame, bad, s.rule, 0),
                  InvalidArgument);
}

TEST_CASE("thread pools of any size produce bit-identical result sets") {
  const int d = 8, order = 5;
  Setup s = make_setup(d, order);
  ObjectiveHandle f = noisy_objective(d);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);

  ThreadPoolEvaluator ref(1);
  auto base = ref.execute(tasks, f);
  REQUIRE(base.size() == tasks.size());
  for (int workers : {2, 3, 4, 8, 64}) {
    ThreadPoolEvaluator pool(workers);
    CHECK(pool.workers() == workers);
    auto got = pool.execute(tasks, f);
    REQUIRE(got.size() == base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      CHECK(got[k].id == base[k].id);
      CHECK(got[k].value == base[k].value);
    }
  }
  CHECK_THROWS_AS(ThreadPoolEvaluator(0), InvalidArgument);
}

TEST_CASE("a task that fails once is retried and completes") {
  const int d = 3, order = 3;
  Setup s = make_setup(d, order);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);

  std::mutex mu;
  bool thrown = false;
  const std::uint64_t flaky = tasks[2].seed;
  ObjectiveHandle f;
  f.dimension = d;
  f.evaluate = [&](const double* x, int n, std::uint64_t seed) {
    {
      std::lock_guard<std::mutex> lock(mu);
      if (seed == flaky && !thrown) {
        thrown = true;
        throw std::runtime_error("transient failure");
      }
    }
    double v = 0.0;
    for (int i = 0; i < n; ++i) v += x[i];
    return v;
  };

  ThreadPoolEvaluator pool(2);
  auto results = pool.execute(tasks, f);
  CHECK(thrown);  // the failure path really ran
  REQUIRE(results.size() == tasks.size());
  for (std::size_t k = 0; k < results.size(); ++k) {
    double expect = 0.0;
    for (double c : tasks[k].point) expect += c;
    CHECK(results[k].value == expect);
  }
}

TEST_CASE("a task that keeps failing raises an error naming it") {
  const int d = 2, order = 3;
  Setup s = make_setup(d, order);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);
  const std::uint64_t poison = tasks[4].seed;

  ObjectiveHandle f;
  f.dimension = d;
  f.evaluate = [poison](const double*, int, std::uint64_t seed) -> double {
    if (seed == poison) throw std::runtime_error("hard failure");
    return 1.0;
  };
  ThreadPoolEvaluator pool(2);
  try {
    pool.execute(tasks, f);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.task_id() == tasks[4].id);
  }
}

TEST_CASE("scheduled execution reduces to the serial gradient bit-for-bit") {
  const int d = 7, order = 7;
  Setup s = make_setup(d, order);
  ObjectiveHandle f = noisy_objective(d);

  auto serial = gradient::dgs_gradient(f, s.theta, s.frame, s.radii, s.rule,
                                       s.base_seed);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);
  for (int workers : {1, 4}) {
    ThreadPoolEvaluator pool(workers);
    auto est = reduce_to_gradient(pool.execute(tasks, f), s.frame, s.radii,
                                  s.rule);
    CHECK(est.gradient == serial.gradient);
    CHECK(est.directional_derivatives == serial.directional_derivatives);
    CHECK(est.evaluations_used == serial.evaluations_used);
  }
}

TEST_CASE("reduction accepts shuffled results and rejects broken sets") {
  const int d = 4, order = 3;
  Setup s = make_setup(d, order);
  ObjectiveHandle f = noisy_objective(d);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, s.base_seed);
  ThreadPoolEvaluator pool(1);
  auto results = pool.execute(tasks, f);
  auto expect = reduce_to_gradient(results, s.frame, s.radii, s.rule);

  // Any ordering reduces identically (the reducer sorts by id).
  auto shuffled = results;
  rng::SplitMix64 gen(5);
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen.uniform01() * i);
    std::swap(shuffled[i - 1], shuffled[j]);
  }
  auto est = reduce_to_gradient(shuffled, s.frame, s.radii, s.rule);
  CHECK(est.gradient == expect.gradient);

  // Wrong count.
  auto missing = results;
  missing.pop_back();
  CHECK_THROWS_AS(reduce_to_gradient(missing, s.frame, s.radii, s.rule),
                  EvaluationError);

  // Right count, duplicate id (one id missing).
  auto dup = results;
  dup[0] = dup[1];
  try {
    reduce_to_gradient(dup, s.frame, s.radii, s.rule);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.task_id() == 0);  // id 0 is the one that went missing
  }
}

TEST_CASE("hex wire format round-trips every bit pattern") {
  CHECK(double_to_hex(1.0) == "3ff0000000000000");
  CHECK(double_to_hex(-2.0) == "c000000000000000");
  CHECK(double_to_hex(0.0) == "0000000000000000");
  CHECK(double_to_hex(-0.0) == "8000000000000000");

  auto roundtrip = [](double x) { return hex_to_double(double_to_hex(x)); };
  for (double x : {0.0, -0.0, 1.0, -1.0, 3.141592653589793,
                   5e-324,                      // smallest denormal
                   2.2250738585072014e-308,     // smallest normal
                   1.7976931348623157e308,      // largest finite
                   std::numeric_limits<double>::infinity(),
                   -std::numeric_limits<double>::infinity()}) {
    double y = roundtrip(x);
    CHECK(std::memcmp(&x, &y, 8) == 0);
  }
  double nan = std::numeric_limits<double>::quiet_NaN();
  double back = roundtrip(nan);
  CHECK(std::memcmp(&nan, &back, 8) == 0);

  rng::SplitMix64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    double x = gen.uniform(-1e6, 1e6);
    CHECK(roundtrip(x) == x);
  }

  CHECK_THROWS_AS(hex_to_double("123"), InvalidArgument);
  CHECK_THROWS_AS(hex_to_double("zzzzzzzzzzzzzzzz"), InvalidArgument);
  CHECK(hex_to_double("3FF0000000000000") == 1.0);  // upper case accepted
}

TEST_CASE("point checksum implements 64-bit FNV-1a") {
  CHECK(fnv1a64("", 0) == 14695981039346656037ULL);           // offset basis
  CHECK(fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar", 6) == 0x85944171f73967e8ULL);

  std::vector<double> p1 = {1.0, 2.0, 3.0};
  std::vector<double> p2 = {1.0, 2.0, 3.0000000000000004};
  CHECK(point_checksum(p1) == point_checksum(p1));
  CHECK(point_checksum(p1) != point_checksum(p2));  // one-ulp sensitivity
  CHECK(point_checksum(p1) == fnv1a64(p1.data(), 24));
}

TEST_CASE("worker protocol: handshake, broadcast, task, shutdown") {
  const int d = 2;
  ObjectiveHandle f = objectives::objective_from_spec("syn:sphere:d2");
  Setup s;
  s.theta = {0.25, -1.5};
  s.frame = directions::perturb_frame(directions::init_frame(d), 2.0, 8);
  s.radii = directions::sample_radii(d, 1.0, 0.2, 9);
  s.rule = quadrature::build_gauss_hermite(3);
  auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, 1234);

  std::ostringstream script;
  script << "DGSW 1 syn:sphere:d2\n";
  script << "THETA 2 " << double_to_hex(s.theta[0]) << " "
         << double_to_hex(s.theta[1]) << "\n";
  script << "FRAME R " << double_to_hex(2.0) << " 8\n";
  for (const EvalTask& t : tasks) {
    script << "TASK " << t.id << " " << t.direction << " " << t.node << " "
           << double_to_hex(t.scale) << " " << t.seed << " "
           << point_checksum(t.point) << "\n";
  }
  script << "END\n";

  std::istringstream in(script.str());
  std::ostringstream out;
  CHECK(dgs::worker::run_worker(in, out) == 0);

  std::istringstream resp(out.str());
  std::string line;
  REQUIRE(std::getline(resp, line));
  CHECK(line == "READY");
  for (const EvalTask& t : tasks) {
    REQUIRE(std::getline(resp, line));
    std::istringstream ls(line);
    std::string kind, hex;
    long long id = -1;
    ls >> kind >> id >> hex;
    CHECK(kind == "RESULT");
    CHECK(id == t.id);
    // The worker's locally rebuilt point must give the in-process value
    // exactly.
    double expect = f(t.point.data(), d, t.seed);
    CHECK(hex_to_double(hex) == expect);
  }
  CHECK(!std::getline(resp, line));  // nothing after the last RESULT
}

TEST_CASE("worker rejects checksum mismatches and malformed sessions") {
  // Checksum mismatch: deliberately corrupt the checksum field.
  {
    std::istringstream in(
        "DGSW 1 syn:sphere:d2\n"
        "THETA 2 " +
        double_to_hex(0.5) + " " + double_to_hex(0.5) +
        "\n"
        "TASK 0 0 0 " +
        double_to_hex(0.0) +
        " 7 1\n"
        "END\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 0);
    std::istringstream resp(out.str());
    std::string line;
    std::getline(resp, line);
    CHECK(line == "READY");
    std::getline(resp, line);
    CHECK(line == "ERROR 0 checksum-mismatch");
  }
  // A task before any THETA broadcast is answered with ERROR, not a crash.
  {
    std::istringstream in(
        "DGSW 1 syn:sphere:d2\nTASK 3 0 0 " + double_to_hex(0.0) +
        " 7 1\nEND\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 0);
    CHECK(out.str().find("ERROR 3 no-theta") != std::string::npos);
  }
  // Bad handshakes: wrong magic, wrong version, unknown objective.
  {
    std::istringstream in("HELLO 1 syn:sphere:d2\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 2);
  }
  {
    std::istringstream in("DGSW 2 syn:sphere:d2\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 2);
  }
  {
    std::istringstream in("DGSW 1 syn:nope:d2\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 2);
  }
  {
    std::istringstream in("");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 2);
  }
  // Unknown command after a valid handshake is a protocol violation.
  {
    std::istringstream in("DGSW 1 syn:sphere:d2\nPING\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 3);
  }
  // EOF without END still shuts down cleanly.
  {
    std::istringstream in("DGSW 1 syn:sphere:d2\n");
    std::ostringstream out;
    CHECK(dgs::worker::run_worker(in, out) == 0);
  }
}

TEST_CASE("process pool matches the thread pool bit-for-bit") {
  const int d = 5, order = 5;
  ObjectiveHandle f = objectives::objective_from_spec("syn:shifted-quadratic:d5");
  Setup s;
  rng::SplitMix64 gen(77);
  s.theta.assign(d, 0.0);
  for (double& v : s.theta) v = gen.uniform(-1.0, 1.0);
  s.frame = directions::init_frame(d);
  s.radii = directions::sample_radii(d, 1.0, 0.2, 6);
  s.rule = quadrature::build_gauss_hermite(order);

  // Walk the frame through a replace and a compose event so the worker's
  // mirrored frame state is exercised, not just the identity.
  ProcessPoolEvaluator procs(2, DGSBENCH_BIN, "syn:shifted-quadratic:d5");
  REQUIRE(procs.workers() == 2);
  ThreadPoolEvaluator threads(2);

  auto run_round = [&](std::uint64_t base_seed) {
    auto tasks = plan_tasks(s.theta, s.frame, s.radii, s.rule, base_seed);
    procs.broadcast_theta(s.theta);
    auto via_procs = procs.execute(tasks, f);
    auto via_threads = threads.execute(tasks, f);
    REQUIRE(via_procs.size() == via_threads.size());
    for (std::size_t k = 0; k < via_procs.size(); ++k) {
      CHECK(via_procs[k].id == via_threads[k].id);
      CHECK(via_procs[k].value == via_threads[k].value);
    }
    auto a = reduce_to_gradient(via_procs, s.frame, s.radii, s.rule);
    auto b = reduce_to_gradient(via_threads, s.frame, s.radii, s.rule);
    CHECK(a.gradient == b.gradient);
  };

  run_round(1);

  s.frame = directions::perturb_frame(s.frame, 2.0, 42,
                                      directions::PerturbMode::Replace);
  procs.on_frame_event(2.0, 42, false);
  run_round(2);

  s.frame = directions::perturb_frame(s.frame, 1.0, 43,
                                      directions::PerturbMode::Compose);
  procs.on_frame_event(1.0, 43, true);
  for (double& v : s.theta) v += 0.125;  // new broadcast must take effect
  run_round(3);
}
