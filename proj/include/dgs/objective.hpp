#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace dgs {

// A blackbox objective to be maximized. `evaluate` receives the parameter
// vector and a seed that fixes any internal stochasticity (e.g. which episode
// initial states a rollout uses), so a (theta, seed) pair always maps to the
// same value. `spec_string` is a parseable description ("syn:sphere:d20",
// "env:cartpole:h16") that lets worker processes rebuild the objective.
struct ObjectiveHandle {
  int dimension = 0;
  std::function<double(const double*, int, std::uint64_t)> evaluate;
  std::string spec_string;

  double operator()(const double* theta, int n, std::uint64_t seed) const {
    return evaluate(theta, n, seed);
  }
};

}  // namespace dgs
