#include "dgs/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dgs/errors.hpp"
#include "dgs/rng.hpp"

namespace dgs::envs {

namespace {

constexpr double kPi = std::numbers::pi;

// CartPole constants (reference classic-control values).
constexpr double kGravity = 9.8;
constexpr double kMassCart = 1.0;
constexpr double kMassPole = 0.1;
constexpr double kTotalMass = kMassCart + kMassPole;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kMassPole * kHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kTau = 0.02;
constexpr double kAngleLimit = 12.0 * 2.0 * kPi / 360.0;
constexpr double kPositionLimit = 2.4;

// MountainCarContinuous constants.
constexpr double kMcPower = 0.0015;
constexpr double kMcMaxSpeed = 0.07;
constexpr double kMcMinPos = -1.2;
constexpr double kMcMaxPos = 0.6;
constexpr double kMcGoalPos = 0.45;

// Pendulum constants.
constexpr double kPendG = 10.0;
constexpr double kPendM = 1.0;
constexpr double kPendL = 1.0;
constexpr double kPendDt = 0.05;
constexpr double kPendMaxSpeed = 8.0;
constexpr double kPendMaxTorque = 2.0;

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

// ((x + pi) mod 2pi) - pi with a nonnegative modulo, mapping into [-pi, pi).
double angle_normalize(double x) {
  double r = std::fmod(x + kPi, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r - kPi;
}

double step_cartpole(EnvState& state, int action) {
  double x = state.v[0], x_dot = state.v[1];
  double theta = state.v[2], theta_dot = state.v[3];
  const double force = (action == 1) ? kForceMag : -kForceMag;
  const double costheta = std::cos(theta);
  const double sintheta = std::sin(theta);
  const double temp =
      (force + kPoleMassLength * theta_dot * theta_dot * sintheta) /
      kTotalMass;
  const double theta_acc =
      (kGravity * sintheta - costheta * temp) /
      (kHalfLength *
       (4.0 / 3.0 - kMassPole * costheta * costheta / kTotalMass));
  const double x_acc = temp - kPoleMassLength * theta_acc * costheta / kTotalMass;
  // Euler, positions updated with the pre-step velocities.
  x += kTau * x_dot;
  x_dot += kTau * x_acc;
  theta += kTau * theta_dot;
  theta_dot += kTau * theta_acc;
  state.v = {x, x_dot, theta, theta_dot};
  state.done = x < -kPositionLimit || x > kPositionLimit ||
               theta < -kAngleLimit || theta > kAngleLimit;
  return 1.0;
}

double step_mountaincar(EnvState& state, double action) {
  double position = state.v[0], velocity = state.v[1];
  const double force = clamp(action, -1.0, 1.0);
  velocity += force * kMcPower - 0.0025 * std::cos(3.0 * position);
  velocity = clamp(velocity, -kMcMaxSpeed, kMcMaxSpeed);
  position += velocity;
  position = clamp(position, kMcMinPos, kMcMaxPos);
  if (position == kMcMinPos && velocity < 0.0) velocity = 0.0;
  state.v[0] = position;
  state.v[1] = velocity;
  state.done = position >= kMcGoalPos;
  double reward = state.done ? 100.0 : 0.0;
  reward -= 0.1 * force * force;
  return reward;
}

double step_pendulum(EnvState& state, double action) {
  double th = state.v[0], th_dot = state.v[1];
  const double u = clamp(action, -kPendMaxTorque, kPendMaxTorque);
  const double an = angle_normalize(th);
  const double cost = an * an + 0.1 * th_dot * th_dot + 0.001 * u * u;
  // Velocity update, then the position update with the *unclipped* new
  // velocity, then the speed clip — the original ordering of this task.
  double new_th_dot =
      th_dot + (-3.0 * kPendG / (2.0 * kPendL) * std::sin(th + kPi) +
                3.0 / (kPendM * kPendL * kPendL) * u) *
                   kPendDt;
  double new_th = th + new_th_dot * kPendDt;
  new_th_dot = clamp(new_th_dot, -kPendMaxSpeed, kPendMaxSpeed);
  state.v[0] = new_th;
  state.v[1] = new_th_dot;
  return -cost;
}

}  // namespace

EnvSpec make_env(EnvId id) {
  EnvSpec spec;
  spec.id = id;
  switch (id) {
    case EnvId::CartPole:
      spec.name = "cartpole";
      spec.obs_dim = 4;
      spec.action_spec = policy::ActionSpec::discrete(2);
      spec.max_steps = 200;
      break;
    case EnvId::MountainCarContinuous:
      spec.name = "mountaincar";
      spec.obs_dim = 2;
      spec.action_spec = policy::ActionSpec::continuous({-1.0}, {1.0});
      spec.max_steps = 999;
      break;
    case EnvId::Pendulum:
      spec.name = "pendulum";
      spec.obs_dim = 3;
      spec.action_spec =
          policy::ActionSpec::continuous({-kPendMaxTorque}, {kPendMaxTorque});
      spec.max_steps = 200;
      break;
  }
  return spec;
}

EnvSpec env_by_name(const std::string& name) {
  if (name == "cartpole") return make_env(EnvId::CartPole);
  if (name == "mountaincar") return make_env(EnvId::MountainCarContinuous);
  if (name == "pendulum") return make_env(EnvId::Pendulum);
  throw InvalidArgument("unknown environment '" + name +
                        "' (valid: cartpole, mountaincar, pendulum)");
}

EnvState reset(const EnvSpec& spec, std::uint64_t seed) {
  rng::SplitMix64 gen(seed);
  EnvState state;
  switch (spec.id) {
    case EnvId::CartPole:
      for (int i = 0; i < 4; ++i) state.v[i] = gen.uniform(-0.05, 0.05);
      break;
    case EnvId::MountainCarContinuous:
      state.v[0] = gen.uniform(-0.6, -0.4);
      state.v[1] = 0.0;
      break;
    case EnvId::Pendulum:
      state.v[0] = gen.uniform(-kPi, kPi);
      state.v[1] = gen.uniform(-1.0, 1.0);
      break;
  }
  return state;
}

void observe(const EnvSpec& spec, const EnvState& state,
             std::vector<double>& obs) {
  obs.resize(spec.obs_dim);
  switch (spec.id) {
    case EnvId::CartPole:
      for (int i = 0; i < 4; ++i) obs[i] = state.v[i];
      break;
    case EnvId::MountainCarContinuous:
      obs[0] = state.v[0];
      obs[1] = state.v[1];
      break;
    case EnvId::Pendulum:
      obs[0] = std::cos(state.v[0]);
      obs[1] = std::sin(state.v[0]);
      obs[2] = state.v[1];
      break;
  }
}

double step(const EnvSpec& spec, EnvState& state, const policy::Action& action) {
  if (state.done) {
    throw ContractViolation("step called on a terminated episode");
  }
  if (action.kind != spec.action_spec.kind) {
    throw InvalidArgument("step: action kind does not match environment");
  }
  double reward = 0.0;
  switch (spec.id) {
    case EnvId::CartPole:
      if (action.index < 0 || action.index >= spec.action_spec.n_actions) {
        throw InvalidArgument("step: discrete action out of range");
      }
      reward = step_cartpole(state, action.index);
      break;
    case EnvId::MountainCarContinuous:
      if (action.values.size() != 1) {
        throw InvalidArgument("step: expected a 1-dim continuous action");
      }
      reward = step_mountaincar(state, action.values[0]);
      break;
    case EnvId::Pendulum:
      if (action.values.size() != 1) {
        throw InvalidArgument("step: expected a 1-dim continuous action");
      }
      reward = step_pendulum(state, action.values[0]);
      break;
  }
  state.steps += 1;
  return reward;
}

EpisodeResult rollout(const EnvSpec& spec, const policy::MlpPolicy& policy,
                      const double* theta, std::uint64_t seed) {
  EnvState state = reset(spec, seed);
  policy::Workspace ws;
  std::vector<double> obs;
  std::vector<double> cont_action;
  EpisodeResult result;
  while (!state.done && state.steps < spec.max_steps) {
    observe(spec, state, obs);
    policy::forward(policy, theta, obs.data(), ws);
    double reward = 0.0;
    if (spec.action_spec.kind == policy::ActionKind::Discrete) {
      int a = policy::discrete_action(ws.out.data(), spec.action_spec.n_actions);
      switch (spec.id) {
        case EnvId::CartPole:
          reward = step_cartpole(state, a);
          break;
        default:
          throw InvalidArgument("rollout: discrete action on continuous task");
      }
    } else {
      policy::continuous_action(spec.action_spec, ws.out.data(), cont_action);
      switch (spec.id) {
        case EnvId::MountainCarContinuous:
          reward = step_mountaincar(state, cont_action[0]);
          break;
        case EnvId::Pendulum:
          reward = step_pendulum(state, cont_action[0]);
          break;
        default:
          throw InvalidArgument("rollout: continuous action on discrete task");
      }
    }
    state.steps += 1;
    result.total_return += reward;
  }
  result.steps = state.steps;
  result.terminated_early = state.done;
  return result;
}

policy::MlpPolicy policy_for(const EnvSpec& spec, int hidden_dim) {
  policy::MlpPolicy p;
  p.obs_dim = spec.obs_dim;
  p.hidden_dim = hidden_dim;
  p.action_spec = spec.action_spec;
  return p;
}

ObjectiveHandle env_objective(EnvId id, int hidden_dim) {
  EnvSpec spec = make_env(id);
  policy::MlpPolicy pol = policy_for(spec, hidden_dim);
  ObjectiveHandle handle;
  handle.dimension = policy::param_count(pol);
  handle.spec_string = "env:" + spec.name + ":h" + std::to_string(hidden_dim);
  handle.evaluate = [spec, pol](const double* theta, int n,
                                std::uint64_t seed) -> double {
    if (n != policy::param_count(pol)) {
      throw InvalidArgument("env objective: parameter length mismatch");
    }
    return rollout(spec, pol, theta, seed).total_return;
  };
  return handle;
}

}  // namespace dgs::envs
