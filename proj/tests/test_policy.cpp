#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"

#include "dgs/errors.hpp"
#include "dgs/policy.hpp"

using namespace dgs;
using namespace dgs::policy;

TEST_CASE("param_count follows the (in+1)h + (h+1)out layout") {
  MlpPolicy cartpole{4, 16, ActionSpec::discrete(2)};
  CHECK(param_count(cartpole) == 114);

  MlpPolicy pendulum{3, 16, ActionSpec::continuous({-2.0}, {2.0})};
  CHECK(param_count(pendulum) == 81);

  MlpPolicy tiny{1, 1, ActionSpec::continuous({0.0}, {1.0})};
  CHECK(param_count(tiny) == 4);
}

TEST_CASE("zero parameters give the tie-break action and the interval midpoint") {
  MlpPolicy disc{4, 16, ActionSpec::discrete(2)};
  std::vector<double> theta(param_count(disc), 0.0);
  std::vector<double> obs = {0.3, -0.1, 0.2, 0.05};
  Action a = act(disc, theta, obs);
  CHECK(a.kind == ActionKind::Discrete);
  CHECK(a.index == 0);  // equal logits break toward the lowest index

  MlpPolicy cont{3, 16, ActionSpec::continuous({-2.0}, {2.0})};
  std::vector<double> theta_c(param_count(cont), 0.0);
  Action b = act(cont, theta_c, {1.0, 0.0, 0.5});
  CHECK(b.kind == ActionKind::Continuous);
  REQUIRE(b.values.size() == 1);
  CHECK(b.values[0] == 0.0);  // tanh(0) maps to the midpoint exactly
}

TEST_CASE("hand-computed single-unit network matches frozen values") {
  // obs_dim=1, hidden_dim=1, one continuous output on [0, 1].
  // theta = [w1=0.5, b1=0.1, w2=0.8, b2=0.2], obs = 0.8:
  //   hidden = tanh(0.5*0.8 + 0.1) = tanh(0.5)   = 0.46211715726000974
  //   out    = 0.8*hidden + 0.2                  = 0.5696937258080078
  //   action = (tanh(out)+1)/2                   = 0.7575671566322751
  // (tolerances absorb the vectorized-tanh backend, accurate to ~2e-14)
  MlpPolicy tiny{1, 1, ActionSpec::continuous({0.0}, {1.0})};
  std::vector<double> theta = {0.5, 0.1, 0.8, 0.2};
  Workspace ws;
  double obs = 0.8;
  forward(tiny, theta.data(), &obs, ws);
  REQUIRE(ws.hidden.size() == 1);
  REQUIRE(ws.out.size() == 1);
  CHECK(ws.hidden[0] == doctest::Approx(0.46211715726000974).epsilon(1e-12));
  CHECK(ws.out[0] == doctest::Approx(0.5696937258080078).epsilon(1e-12));

  Action a = act(tiny, theta, {obs});
  CHECK(a.values[0] == doctest::Approx(0.7575671566322751).epsilon(1e-12));
}

TEST_CASE("discrete head picks the argmax with lowest-index ties") {
  double logits1[4] = {0.1, 0.9, 0.9, 0.2};
  CHECK(discrete_action(logits1, 4) == 1);
  double logits2[3] = {-1.0, -2.0, -0.5};
  CHECK(discrete_action(logits2, 3) == 2);
  double logits3[2] = {0.0, 0.0};
  CHECK(discrete_action(logits3, 2) == 0);
  double logits4[1] = {42.0};
  CHECK(discrete_action(logits4, 1) == 0);
}

TEST_CASE("continuous actions always land inside the bounds") {
  auto spec = ActionSpec::continuous({-2.0, 0.0}, {2.0, 10.0});
  std::vector<double> action;
  for (double v : {-1e6, -3.0, -0.1, 0.0, 0.1, 3.0, 1e6}) {
    double out[2] = {v, -v};
    continuous_action(spec, out, action);
    REQUIRE(action.size() == 2);
    CHECK(action[0] >= -2.0);
    CHECK(action[0] <= 2.0);
    CHECK(action[1] >= 0.0);
    CHECK(action[1] <= 10.0);
  }
  // Saturation approaches the bounds.
  double big[2] = {50.0, -50.0};
  continuous_action(spec, big, action);
  CHECK(action[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(action[1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("init_params draws per-layer scales of 1/sqrt(fan_in)") {
  MlpPolicy policy{8, 64, ActionSpec::discrete(4)};
  auto theta = init_params(policy, 2024);
  REQUIRE(static_cast<int>(theta.size()) == param_count(policy));

  auto stddev = [](const double* x, int n) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += x[i];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
    return std::sqrt(var / n);
  };

  const int w1 = 64 * 8;
  const int layer2_off = w1 + 64;
  const int w2 = 4 * 64;
  // W1 entries: std 1/sqrt(8); W2 entries: std 1/sqrt(64). 512 and 256 draws
  // put the sample std within ~7% of the target with huge margin.
  CHECK(stddev(theta.data(), w1) ==
        doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(0.10));
  CHECK(stddev(theta.data() + layer2_off, w2) ==
        doctest::Approx(1.0 / std::sqrt(64.0)).epsilon(0.10));

  CHECK(init_params(policy, 2024) == theta);
  CHECK(init_params(policy, 2025) != theta);
}

TEST_CASE("checkpoint files round-trip bitwise and reject mismatches") {
  MlpPolicy policy{3, 5, ActionSpec::continuous({-1.0}, {1.0})};
  auto theta = init_params(policy, 7);
  theta[0] = -0.0;  // signed zero must survive
  const std::string path = "policy_roundtrip.bin";
  save_params(path, policy, theta);
  auto back = load_params(path, policy);
  CHECK(back == theta);
  CHECK(std::signbit(back[0]));

  // Shape mismatch: same file, different policy.
  MlpPolicy other{3, 6, ActionSpec::continuous({-1.0}, {1.0})};
  CHECK_THROWS_AS(load_params(path, other), InvalidArgument);
  MlpPolicy kind_flip{3, 5, ActionSpec::discrete(1)};
  CHECK_THROWS_AS(load_params(path, kind_flip), InvalidArgument);

  // Corrupt magic.
  {
    std::FILE* f = std::fopen(path.c_str(), "r+b");
    REQUIRE(f != nullptr);
    std::fputc('X', f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_params(path, policy), InvalidArgument);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_params("no_such_checkpoint.bin", policy),
                  InvalidArgument);
  std::vector<double> wrong(theta.size() + 1, 0.0);
  CHECK_THROWS_AS(save_params(path, policy, wrong), InvalidArgument);
}

TEST_CASE("act validates observation and parameter lengths") {
  MlpPolicy policy{4, 16, ActionSpec::discrete(2)};
  std::vector<double> theta(param_count(policy), 0.0);
  CHECK_THROWS_AS(act(policy, theta, {1.0, 2.0}), InvalidArgument);
  std::vector<double> short_theta(10, 0.0);
  CHECK_THROWS_AS(act(policy, short_theta, {1.0, 2.0, 3.0, 4.0}),
                  InvalidArgument);
}

TEST_CASE("ActionSpec constructors validate their inputs") {
  CHECK_THROWS_AS(ActionSpec::discrete(0), InvalidArgument);
  CHECK_THROWS_AS(ActionSpec::continuous({}, {}), InvalidArgument);
  CHECK_THROWS_AS(ActionSpec::continuous({0.0}, {0.0}), InvalidArgument);
  CHECK_THROWS_AS(ActionSpec::continuous({1.0}, {0.0, 2.0}), InvalidArgument);
  CHECK(ActionSpec::discrete(3).out_dim() == 3);
  CHECK(ActionSpec::continuous({0.0, 0.0}, {1.0, 1.0}).out_dim() == 2);
}
