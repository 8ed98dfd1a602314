#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dgs/objective.hpp"
#include "dgs/policy.hpp"

namespace dgs::envs {

enum class EnvId { CartPole, MountainCarContinuous, Pendulum };

struct EnvSpec {
  EnvId id = EnvId::CartPole;
  std::string name;  // "cartpole", "mountaincar", "pendulum"
  int obs_dim = 0;
  policy::ActionSpec action_spec;
  int max_steps = 0;
};

// Environment-specific state components:
//   CartPole:    v = (x, x_dot, angle, angle_dot)
//   MountainCar: v = (position, velocity)
//   Pendulum:    v = (angle, angle_dot)
struct EnvState {
  std::array<double, 4> v{};
  int steps = 0;
  bool done = false;  // environment-level termination (not step-limit)
};

struct EpisodeResult {
  double total_return = 0.0;
  int steps = 0;
  bool terminated_early = false;
};

EnvSpec make_env(EnvId id);
// Accepts "cartpole", "mountaincar", "pendulum"; otherwise throws an
// invalid-argument error listing the valid names.
EnvSpec env_by_name(const std::string& name);

// Deterministic initial state. Draw order (one uniform each, documented so
// trajectories are platform-identical):
//   CartPole:    x, x_dot, angle, angle_dot ~ U[-0.05, 0.05]
//   MountainCar: position ~ U[-0.6, -0.4]; velocity = 0
//   Pendulum:    angle ~ U[-pi, pi]; angle_dot ~ U[-1, 1]
EnvState reset(const EnvSpec& spec, std::uint64_t seed);

// Observation vector: CartPole passes the state through; MountainCar gives
// (position, velocity); Pendulum gives (cos angle, sin angle, angle_dot).
void observe(const EnvSpec& spec, const EnvState& state,
             std::vector<double>& obs);

// One physics step with the reference dynamics; returns the reward and
// advances the state. Throws a contract-violation error if called after the
// environment has terminated.
double step(const EnvSpec& spec, EnvState& state, const policy::Action& action);

// Full episode: reset, act/step until termination or max_steps.
EpisodeResult rollout(const EnvSpec& spec, const policy::MlpPolicy& policy,
                      const double* theta, std::uint64_t seed);

// Policy shape used for a given environment (obs -> hidden -> action head).
policy::MlpPolicy policy_for(const EnvSpec& spec, int hidden_dim);

// Blackbox objective: J(theta) = total return of one rollout seeded by the
// evaluation seed; spec_string is "env:<name>:h<hidden>".
ObjectiveHandle env_objective(EnvId id, int hidden_dim);

}  // namespace dgs::envs
