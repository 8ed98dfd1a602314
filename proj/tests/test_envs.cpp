#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dgs/envs.hpp"
#include "dgs/errors.hpp"
#include "dgs/objectives.hpp"
#include "dgs/policy.hpp"

using namespace dgs;
using namespace dgs::envs;

namespace {

struct FixtureRow {
  int step = 0;
  bool has_action = false;
  double action = 0.0;
  double reward = 0.0;
  std::vector<double> state;
  bool done = false;
};

std::vector<FixtureRow> load_fixture(const std::string& name, int state_dim) {
  std::ifstream f(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE_MESSAGE(f.good(), "missing fixture ", name);
  std::string line;
  REQUIRE(std::getline(f, line));  // header
  std::vector<FixtureRow> rows;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    FixtureRow row;
    std::getline(ss, cell, ',');
    row.step = std::stoi(cell);
    std::getline(ss, cell, ',');
    row.has_action = !cell.empty();
    if (row.has_action) row.action = std::stod(cell);
    std::getline(ss, cell, ',');
    if (!cell.empty()) row.reward = std::stod(cell);
    for (int i = 0; i < state_dim; ++i) {
      REQUIRE(static_cast<bool>(std::getline(ss, cell, ',')));
      row.state.push_back(std::stod(cell));
    }
    std::getline(ss, cell, ',');
    row.done = (cell == "1");
    rows.push_back(row);
  }
  return rows;
}

void replay_fixture(const std::string& file) {
  const std::string env_name = file.substr(0, file.find('_'));
  EnvSpec spec = env_by_name(env_name);
  const int sd = (spec.id == EnvId::CartPole) ? 4 : 2;
  auto rows = load_fixture(file, sd);
  REQUIRE(rows.size() >= 2);
  REQUIRE(rows[0].step == 0);
  REQUIRE(!rows[0].has_action);

  EnvState state;
  for (int i = 0; i < sd; ++i) state.v[i] = rows[0].state[i];
  state.steps = 0;
  state.done = false;

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const FixtureRow& row = rows[r];
    policy::Action a;
    if (spec.action_spec.kind == policy::ActionKind::Discrete) {
      a.kind = policy::ActionKind::Discrete;
      a.index = static_cast<int>(std::lround(row.action));
    } else {
      a.kind = policy::ActionKind::Continuous;
      a.values = {row.action};
    }
    double reward = step(spec, state, a);
    CAPTURE(file);
    CAPTURE(row.step);
    CHECK(std::abs(reward - row.reward) <= 1e-10);
    for (int i = 0; i < sd; ++i) {
      CAPTURE(i);
      CHECK(std::abs(state.v[i] - row.state[i]) <= 1e-10);
    }
    CHECK(state.done == row.done);
    CHECK(state.steps == row.step);
  }
  if (state.done) {
    policy::Action a;
    a.kind = spec.action_spec.kind;
    a.values = {0.0};
    CHECK_THROWS_AS(step(spec, state, a), ContractViolation);
  }
}

}  // namespace

TEST_CASE("recorded trajectories replay to 1e-10 per component") {
  for (const char* name :
       {"cartpole_1.csv", "cartpole_2.csv", "cartpole_3.csv",
        "mountaincar_1.csv", "mountaincar_2.csv", "mountaincar_3.csv",
        "pendulum_1.csv", "pendulum_2.csv", "pendulum_3.csv"}) {
    replay_fixture(name);
  }
}

TEST_CASE("env specs expose the documented shapes") {
  EnvSpec cp = make_env(EnvId::CartPole);
  CHECK(cp.name == "cartpole");
  CHECK(cp.obs_dim == 4);
  CHECK(cp.action_spec.kind == policy::ActionKind::Discrete);
  CHECK(cp.action_spec.n_actions == 2);
  CHECK(cp.max_steps == 200);

  EnvSpec mc = make_env(EnvId::MountainCarContinuous);
  CHECK(mc.name == "mountaincar");
  CHECK(mc.obs_dim == 2);
  CHECK(mc.action_spec.kind == policy::ActionKind::Continuous);
  CHECK(mc.action_spec.low == std::vector<double>{-1.0});
  CHECK(mc.action_spec.high == std::vector<double>{1.0});
  CHECK(mc.max_steps == 999);

  EnvSpec pd = make_env(EnvId::Pendulum);
  CHECK(pd.name == "pendulum");
  CHECK(pd.obs_dim == 3);
  CHECK(pd.action_spec.low == std::vector<double>{-2.0});
  CHECK(pd.action_spec.high == std::vector<double>{2.0});
  CHECK(pd.max_steps == 200);

  CHECK(env_by_name("pendulum").id == EnvId::Pendulum);
  CHECK_THROWS_WITH_AS(env_by_name("lander"),
                       doctest::Contains("cartpole"), InvalidArgument);
}

TEST_CASE("reset draws land in the documented ranges and are seed-stable") {
  EnvSpec cp = make_env(EnvId::CartPole);
  EnvSpec mc = make_env(EnvId::MountainCarContinuous);
  EnvSpec pd = make_env(EnvId::Pendulum);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EnvState s = reset(cp, seed);
    for (int i = 0; i < 4; ++i) {
      CHECK(s.v[i] >= -0.05);
      CHECK(s.v[i] <= 0.05);
    }
    CHECK(s.steps == 0);
    CHECK(!s.done);

    EnvState m = reset(mc, seed);
    CHECK(m.v[0] >= -0.6);
    CHECK(m.v[0] <= -0.4);
    CHECK(m.v[1] == 0.0);

    EnvState p = reset(pd, seed);
    CHECK(p.v[0] >= -std::numbers::pi);
    CHECK(p.v[0] <= std::numbers::pi);
    CHECK(p.v[1] >= -1.0);
    CHECK(p.v[1] <= 1.0);
  }
  EnvState a = reset(cp, 99);
  EnvState b = reset(cp, 99);
  CHECK(a.v == b.v);
  EnvState c = reset(cp, 100);
  CHECK(a.v != c.v);
}

TEST_CASE("observations map state as documented") {
  EnvSpec cp = make_env(EnvId::CartPole);
  EnvState s;
  s.v = {0.1, -0.2, 0.3, -0.4};
  std::vector<double> obs;
  observe(cp, s, obs);
  CHECK(obs == std::vector<double>{0.1, -0.2, 0.3, -0.4});

  EnvSpec pd = make_env(EnvId::Pendulum);
  EnvState p;
  p.v = {0.7, -2.5, 0.0, 0.0};
  observe(pd, p, obs);
  REQUIRE(obs.size() == 3);
  CHECK(obs[0] == std::cos(0.7));
  CHECK(obs[1] == std::sin(0.7));
  CHECK(obs[2] == -2.5);

  EnvSpec mc = make_env(EnvId::MountainCarContinuous);
  EnvState m;
  m.v = {-0.5, 0.04, 0.0, 0.0};
  observe(mc, m, obs);
  CHECK(obs == std::vector<double>{-0.5, 0.04});
}

TEST_CASE("balanced cart earns one unit of reward per surviving step") {
  EnvSpec cp = make_env(EnvId::CartPole);
  EnvState s;  // exactly balanced at the origin
  policy::Action left;
  left.kind = policy::ActionKind::Discrete;
  left.index = 0;
  double r = step(cp, s, left);
  CHECK(r == 1.0);

  // Any rollout's return equals its step count.
  policy::MlpPolicy pi = policy_for(cp, 16);
  auto theta = policy::init_params(pi, 5);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    EpisodeResult ep = rollout(cp, pi, theta.data(), seed);
    CHECK(ep.total_return == static_cast<double>(ep.steps));
    CHECK(ep.steps <= 200);
    CHECK(ep.steps >= 1);
  }
}

TEST_CASE("pendulum rewards are bounded and zero at the rest point") {
  EnvSpec pd = make_env(EnvId::Pendulum);
  EnvState upright;  // angle 0, no spin
  policy::Action no_torque;
  no_torque.kind = policy::ActionKind::Continuous;
  no_torque.values = {0.0};
  double r = step(pd, upright, no_torque);
  CHECK(r == 0.0);  // cost uses the pre-step state: perfectly upright, idle

  // Per-step cost is at most pi^2 + 0.1*8^2 + 0.001*2^2.
  const double bound = std::numbers::pi * std::numbers::pi + 6.4 + 0.004;
  policy::MlpPolicy pi = policy_for(pd, 16);
  auto theta = policy::init_params(pi, 11);
  for (std::uint64_t seed : {4ull, 5ull}) {
    EnvState s = reset(pd, seed);
    std::vector<double> obs;
    for (int t = 0; t < 200; ++t) {
      observe(pd, s, obs);
      policy::Action a = policy::act(pi, theta, obs);
      double rr = step(pd, s, a);
      CHECK(rr <= 0.0);
      CHECK(rr >= -bound);
    }
    CHECK(s.steps == 200);
  }
}

TEST_CASE("idle mountain car accrues exactly zero control cost") {
  EnvSpec mc = make_env(EnvId::MountainCarContinuous);
  EnvState s = reset(mc, 3);
  policy::Action idle;
  idle.kind = policy::ActionKind::Continuous;
  idle.values = {0.0};
  double total = 0.0;
  for (int t = 0; t < 999 && !s.done; ++t) total += step(mc, s, idle);
  CHECK(total == 0.0);  // -0.1*u^2 per step with u = 0, and no goal bonus
  CHECK(!s.done);
  CHECK(s.steps == 999);
}

TEST_CASE("rollout is deterministic in the seed and respects max_steps") {
  for (EnvId id :
       {EnvId::CartPole, EnvId::MountainCarContinuous, EnvId::Pendulum}) {
    EnvSpec spec = make_env(id);
    policy::MlpPolicy pi = policy_for(spec, 8);
    auto theta = policy::init_params(pi, 21);
    EpisodeResult a = rollout(spec, pi, theta.data(), 77);
    EpisodeResult b = rollout(spec, pi, theta.data(), 77);
    CHECK(a.total_return == b.total_return);
    CHECK(a.steps == b.steps);
    CHECK(a.terminated_early == b.terminated_early);
    CHECK(a.steps <= spec.max_steps);
  }
}

TEST_CASE("env objective equals the rollout return for the same seed") {
  EnvSpec spec = make_env(EnvId::CartPole);
  ObjectiveHandle f = env_objective(EnvId::CartPole, 16);
  CHECK(f.dimension == 114);
  CHECK(f.spec_string == "env:cartpole:h16");
  policy::MlpPolicy pi = policy_for(spec, 16);
  auto theta = policy::init_params(pi, 9);
  double j = f(theta.data(), static_cast<int>(theta.size()), 123);
  EpisodeResult ep = rollout(spec, pi, theta.data(), 123);
  CHECK(j == ep.total_return);
}

TEST_CASE("multimodal landscape: bump heights, support, and global maximum") {
  using namespace dgs::objectives;
  // Exact peak values at the centers.
  CHECK(multimodal_value(kBump2X, kBump2Y) == 3.0);
  CHECK(multimodal_value(kBump1X, kBump1Y) == 1.0);
  // Compact support: zero far away.
  CHECK(multimodal_value(10.0, 10.0) == 0.0);
  CHECK(multimodal_value(-5.0, 0.64) == 0.0);

  // Nothing on a dense grid beats the tall bump's center.
  double best = -1.0;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 200; ++j) {
      double x = -1.0 + 5.0 * i / 199.0;
      double y = -1.0 + 4.0 * j / 199.0;
      double v = multimodal_value(x, y);
      CHECK(v <= 3.0);
      if (v > best) best = v;
    }
  }
  CHECK(best <= 3.0);
  CHECK(best > 2.9);  // the grid passes near the optimum

  ObjectiveHandle f = synthetic_objective(Kind::Multimodal2d, 2);
  double at_peak[2] = {kBump2X, kBump2Y};
  CHECK(f(at_peak, 2, 0) == 3.0);
  CHECK_THROWS_AS(synthetic_objective(Kind::Multimodal2d, 3), InvalidArgument);
}

TEST_CASE("synthetic sphere and shifted quadratic have the advertised maxima") {
  using namespace dgs::objectives;
  ObjectiveHandle sphere = synthetic_objective(Kind::Sphere, 4);
  double origin[4] = {0.0, 0.0, 0.0, 0.0};
  CHECK(sphere(origin, 4, 0) == 0.0);
  double x[4] = {1.0, -2.0, 0.5, 0.0};
  CHECK(sphere(x, 4, 0) == -5.25);

  ObjectiveHandle shifted = synthetic_objective(Kind::ShiftedQuadratic, 3);
  double at_shift[3] = {std::sin(1.0), std::sin(2.0), std::sin(3.0)};
  CHECK(shifted(at_shift, 3, 0) == 0.0);
  double away[3] = {std::sin(1.0) + 1.0, std::sin(2.0), std::sin(3.0)};
  CHECK(shifted(away, 3, 0) == -1.0);
}

TEST_CASE("objective_from_spec parses and rejects spec strings") {
  using namespace dgs::objectives;
  ObjectiveHandle a = objective_from_spec("syn:sphere:d20");
  CHECK(a.dimension == 20);
  CHECK(a.spec_string == "syn:sphere:d20");

  ObjectiveHandle b = objective_from_spec("env:pendulum:h16");
  CHECK(b.dimension == 81);

  ObjectiveHandle c = objective_from_spec("syn:multimodal-2d:d2");
  double peak[2] = {kBump2X, kBump2Y};
  CHECK(c(peak, 2, 0) == 3.0);

  CHECK_THROWS_AS(objective_from_spec("syn:rosenbrock:d2"), InvalidArgument);
  CHECK_THROWS_AS(objective_from_spec("env:lander:h16"), InvalidArgument);
  CHECK_THROWS_AS(objective_from_spec("nonsense"), InvalidArgument);
  CHECK_THROWS_AS(objective_from_spec("syn:sphere:d0"), InvalidArgument);
  CHECK_THROWS_AS(objective_from_spec("syn:sphere:dX"), InvalidArgument);
}
