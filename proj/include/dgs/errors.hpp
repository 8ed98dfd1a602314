#pragma once

#include <stdexcept>
#include <string>

namespace dgs {

// Malformed caller input: dimension mismatches, out-of-range knobs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An objective evaluation failed and the retry failed too. Carries the id of
// the offending task (or node index when raised from a single-direction call).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, long task_id = -1)
      : std::runtime_error(what), task_id_(task_id) {}
  long task_id() const noexcept { return task_id_; }

 private:
  long task_id_;
};

// A numerical invariant broke down (e.g. non-finite gradient entries).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// API misuse that violates a documented contract (e.g. stepping a finished
// episode).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace dgs
