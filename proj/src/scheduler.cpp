#include "dgs/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <thread>

#include <csignal>
#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "dgs/errors.hpp"

namespace dgs::scheduler {

std::vector<EvalTask> plan_tasks(const std::vector<double>& theta,
                                 const directions::DirectionMatrix& frame,
                                 const directions::SmoothingRadii& radii,
                                 const quadrature::QuadratureRule& rule,
                                 std::uint64_t base_seed,
                                 bool common_random_numbers) {
  const int d = static_cast<int>(theta.size());
  if (frame.dim != d || static_cast<int>(radii.values.size()) != d) {
    throw InvalidArgument("plan_tasks: dimension mismatch");
  }
  const int order = rule.order;
  std::vector<EvalTask> tasks;
  tasks.reserve(static_cast<std::size_t>(d) * order);
  for (int i = 0; i < d; ++i) {
    const double sigma = radii.values[i];
    const double* xi = frame.row(i);
    for (int m = 0; m < order; ++m) {
      EvalTask t;
      t.id = static_cast<long long>(i) * order + m;
      t.direction = i;
      t.node = m;
      t.scale = gradient::node_scale(sigma, rule.nodes[m]);
      t.seed = common_random_numbers ? base_seed
                                     : gradient::node_seed(base_seed, i, m);
      t.point.resize(d);
      gradient::eval_point(theta.data(), d, xi, t.scale, t.point.data());
      tasks.push_back(std::move(t));
    }
  }
  return tasks;
}

namespace {

// Contiguous static partition: worker w handles [start(w), start(w)+len(w)),
// len = floor(n/L) plus one extra for the first n mod L workers.
void partition(std::size_t n, int workers, std::vector<std::size_t>& starts,
               std::vector<std::size_t>& lens) {
  starts.assign(workers, 0);
  lens.assign(workers, 0);
  std::size_t base = n / workers;
  std::size_t rem = n % workers;
  std::size_t pos = 0;
  for (int w = 0; w < workers; ++w) {
    std::size_t len = base + (static_cast<std::size_t>(w) < rem ? 1 : 0);
    starts[w] = pos;
    lens[w] = len;
    pos += len;
  }
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

ThreadPoolEvaluator::ThreadPoolEvaluator(int workers) : workers_(workers) {
  if (workers < 1) {
    throw InvalidArgument("ThreadPoolEvaluator: workers must be >= 1");
  }
}

std::vector<EvalResult> ThreadPoolEvaluator::execute(
    const std::vector<EvalTask>& tasks, const ObjectiveHandle& f) {
  const std::size_t n = tasks.size();
  std::vector<EvalResult> results(n);
  std::vector<char> failed(n, 0);

  auto run_block = [&](std::size_t start, std::size_t len) {
    for (std::size_t k = start; k < start + len; ++k) {
      const EvalTask& t = tasks[k];
      EvalResult& r = results[k];
      r.id = t.id;
      double t0 = now_ms();
      try {
        r.value = f(t.point.data(), static_cast<int>(t.point.size()), t.seed);
      } catch (...) {
        failed[k] = 1;
      }
      r.wall_ms = now_ms() - t0;
    }
  };

  if (workers_ == 1 || n <= 1) {
    run_block(0, n);
  } else {
    std::vector<std::size_t> starts, lens;
    partition(n, workers_, starts, lens);
    std::vector<std::thread> threads;
    threads.reserve(workers_);
    for (int w = 0; w < workers_; ++w) {
      if (lens[w] == 0) continue;
      threads.emplace_back(run_block, starts[w], lens[w]);
    }
    for (auto& th : threads) th.join();
  }

  // Single retry for failed tasks, on the calling thread.
  for (std::size_t k = 0; k < n; ++k) {
    if (!failed[k]) continue;
    const EvalTask& t = tasks[k];
    try {
      results[k].value =
          f(t.point.data(), static_cast<int>(t.point.size()), t.seed);
    } catch (const std::exception& e) {
      throw EvaluationError("task " + std::to_string(t.id) +
                                " failed twice: " + e.what(),
                            t.id);
    }
  }

  std::sort(results.begin(), results.end(),
            [](const EvalResult& a, const EvalResult& b) { return a.id < b.id; });
  return results;
}

gradient::GradientEstimate reduce_to_gradient(
    std::vector<EvalResult> results, const directions::DirectionMatrix& frame,
    const directions::SmoothingRadii& radii,
    const quadrature::QuadratureRule& rule) {
  const int d = frame.dim;
  const int order = rule.order;
  if (static_cast<int>(radii.values.size()) != d) {
    throw InvalidArgument("reduce_to_gradient: radii length mismatch");
  }
  const long long expected = static_cast<long long>(d) * order;
  if (static_cast<long long>(results.size()) != expected) {
    throw EvaluationError("reduce_to_gradient: expected " +
                              std::to_string(expected) + " results, got " +
                              std::to_string(results.size()),
                          -1);
  }
  std::sort(results.begin(), results.end(),
            [](const EvalResult& a, const EvalResult& b) { return a.id < b.id; });
  for (long long k = 0; k < expected; ++k) {
    if (results[k].id != k) {
      throw EvaluationError(
          "reduce_to_gradient: incomplete result set at id " +
              std::to_string(k),
          k);
    }
  }

  gradient::GradientEstimate est;
  est.kind = gradient::EstimatorKind::DgsQuadrature;
  est.directional_derivatives.assign(d, 0.0);
  est.gradient.assign(d, 0.0);
  est.evaluations_used = expected;

  std::vector<double> values(order);
  for (int i = 0; i < d; ++i) {
    for (int m = 0; m < order; ++m) {
      values[m] = results[static_cast<std::size_t>(i) * order + m].value;
    }
    est.directional_derivatives[i] =
        gradient::reduce_directional(rule, values.data(), radii.values[i]);
  }
  gradient::assemble_gradient(frame, est.directional_derivatives.data(),
                              est.gradient.data());
  return est;
}

std::string double_to_hex(double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(bits));
  return std::string(buf, 16);
}

double hex_to_double(const std::string& s) {
  if (s.size() != 16) throw InvalidArgument("hex_to_double: need 16 hex digits");
  std::uint64_t bits = 0;
  for (char c : s) {
    int v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else if (c >= 'A' && c <= 'F') {
      v = c - 'A' + 10;
    } else {
      throw InvalidArgument("hex_to_double: invalid hex digit");
    }
    bits = (bits << 4) | static_cast<std::uint64_t>(v);
  }
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t point_checksum(const std::vector<double>& point) {
  return fnv1a64(point.data(), point.size() * sizeof(double));
}

// ---------------------------------------------------------------------------
// Process pool
// ---------------------------------------------------------------------------

ProcessPoolEvaluator::ProcessPoolEvaluator(int workers,
                                           std::string worker_binary,
                                           std::string objective_spec) {
  if (workers < 1) {
    throw InvalidArgument("ProcessPoolEvaluator: workers must be >= 1");
  }
  // Dead workers surface as failed writes/reads, not process-killing signals.
  std::signal(SIGPIPE, SIG_IGN);

  procs_.resize(workers);
  for (int w = 0; w < workers; ++w) {
    int in_pipe[2];   // parent -> child
    int out_pipe[2];  // child -> parent
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
      shutdown();
      throw EvaluationError("ProcessPoolEvaluator: pipe() failed", -1);
    }
    int pid = fork();
    if (pid < 0) {
      shutdown();
      throw EvaluationError("ProcessPoolEvaluator: fork() failed", -1);
    }
    if (pid == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      close(in_pipe[0]);
      close(in_pipe[1]);
      close(out_pipe[0]);
      close(out_pipe[1]);
      execl(worker_binary.c_str(), worker_binary.c_str(), "worker",
            static_cast<char*>(nullptr));
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    Proc& p = procs_[w];
    p.pid = pid;
    p.to_child = in_pipe[1];
    p.from_child = out_pipe[0];
    p.alive = true;

    if (!send_line(p, "DGSW 1 " + objective_spec)) continue;
    std::string line;
    if (!read_line(p, line) || line != "READY") {
      p.alive = false;
    }
  }
}

ProcessPoolEvaluator::~ProcessPoolEvaluator() { shutdown(); }

void ProcessPoolEvaluator::shutdown() {
  for (Proc& p : procs_) {
    if (p.to_child >= 0) {
      if (p.alive) send_line(p, "END");
      close(p.to_child);
      p.to_child = -1;
    }
    if (p.from_child >= 0) {
      close(p.from_child);
      p.from_child = -1;
    }
    if (p.pid > 0) {
      int status = 0;
      waitpid(p.pid, &status, 0);
      p.pid = -1;
    }
    p.alive = false;
  }
}

bool ProcessPoolEvaluator::send_line(Proc& p, const std::string& line) {
  if (!p.alive && p.to_child < 0) return false;
  std::string msg = line + "\n";
  std::size_t off = 0;
  while (off < msg.size()) {
    ssize_t n = write(p.to_child, msg.data() + off, msg.size() - off);
    if (n <= 0) {
      p.alive = false;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

bool ProcessPoolEvaluator::read_line(Proc& p, std::string& line) {
  while (true) {
    std::size_t nl = p.rdbuf.find('\n');
    if (nl != std::string::npos) {
      line = p.rdbuf.substr(0, nl);
      p.rdbuf.erase(0, nl + 1);
      return true;
    }
    char buf[4096];
    ssize_t n = read(p.from_child, buf, sizeof(buf));
    if (n <= 0) {
      p.alive = false;
      return false;
    }
    p.rdbuf.append(buf, static_cast<std::size_t>(n));
  }
}

void ProcessPoolEvaluator::broadcast_theta(const std::vector<double>& theta) {
  std::string line = "THETA " + std::to_string(theta.size());
  for (double x : theta) {
    line += ' ';
    line += double_to_hex(x);
  }
  for (Proc& p : procs_) {
    if (p.alive) send_line(p, line);
  }
}

void ProcessPoolEvaluator::on_frame_event(double alpha, std::uint64_t seed,
                                          bool compose) {
  std::string line = std::string("FRAME ") + (compose ? "C" : "R") + " " +
                     double_to_hex(alpha) + " " + std::to_string(seed);
  for (Proc& p : procs_) {
    if (p.alive) send_line(p, line);
  }
}

std::vector<EvalResult> ProcessPoolEvaluator::execute(
    const std::vector<EvalTask>& tasks, const ObjectiveHandle& f) {
  const std::size_t n = tasks.size();
  const int nw = static_cast<int>(procs_.size());
  std::vector<std::size_t> starts, lens;
  partition(n, nw, starts, lens);

  std::vector<EvalResult> results(n);
  std::vector<char> pending(n, 1);

  // Ship each worker its contiguous block.
  for (int w = 0; w < nw; ++w) {
    Proc& p = procs_[w];
    if (!p.alive || lens[w] == 0) continue;
    for (std::size_t k = starts[w]; k < starts[w] + lens[w]; ++k) {
      const EvalTask& t = tasks[k];
      std::string line = "TASK " + std::to_string(t.id) + " " +
                         std::to_string(t.direction) + " " +
                         std::to_string(t.node) + " " + double_to_hex(t.scale) +
                         " " + std::to_string(t.seed) + " " +
                         std::to_string(point_checksum(t.point));
      if (!send_line(p, line)) break;
    }
  }

  // Collect per worker; RESULT lines arrive in the order tasks were sent.
  for (int w = 0; w < nw; ++w) {
    Proc& p = procs_[w];
    for (std::size_t k = starts[w]; k < starts[w] + lens[w]; ++k) {
      if (!p.alive) break;
      std::string line;
      if (!read_line(p, line)) break;
      std::size_t sp1 = line.find(' ');
      std::size_t sp2 = line.find(' ', sp1 + 1);
      if (sp1 == std::string::npos) {
        p.alive = false;
        break;
      }
      std::string kind = line.substr(0, sp1);
      long long id = std::stoll(line.substr(
          sp1 + 1, sp2 == std::string::npos ? std::string::npos : sp2 - sp1 - 1));
      if (kind == "RESULT" && sp2 != std::string::npos) {
        // Task blocks are contiguous, so map the id back to its slot.
        std::size_t slot = k;
        if (tasks[slot].id != id) {
          // Defensive: scan the block for the matching task.
          slot = n;
          for (std::size_t j = starts[w]; j < starts[w] + lens[w]; ++j) {
            if (tasks[j].id == id) {
              slot = j;
              break;
            }
          }
          if (slot == n) {
            p.alive = false;
            break;
          }
        }
        results[slot].id = id;
        results[slot].value = hex_to_double(line.substr(sp2 + 1, 16));
        pending[slot] = 0;
      }
      // ERROR <id> ... leaves the task pending for the in-process retry.
    }
  }

  // Any task a worker did not answer gets one in-process retry.
  for (std::size_t k = 0; k < n; ++k) {
    if (!pending[k]) continue;
    const EvalTask& t = tasks[k];
    try {
      results[k].id = t.id;
      results[k].value =
          f(t.point.data(), static_cast<int>(t.point.size()), t.seed);
      pending[k] = 0;
    } catch (const std::exception& e) {
      throw EvaluationError("task " + std::to_string(t.id) +
                                " failed twice: " + e.what(),
                            t.id);
    }
  }

  std::sort(results.begin(), results.end(),
            [](const EvalResult& a, const EvalResult& b) { return a.id < b.id; });
  return results;
}

}  // namespace dgs::scheduler
