#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dgs::policy {

enum class ActionKind { Discrete, Continuous };

// Discrete(n) chooses one of n action indices; Continuous squashes each
// network output into the matching [low, high] interval.
struct ActionSpec {
  ActionKind kind = ActionKind::Discrete;
  int n_actions = 0;               // discrete
  std::vector<double> low, high;   // continuous, elementwise bounds

  static ActionSpec discrete(int n_actions);
  static ActionSpec continuous(std::vector<double> low,
                               std::vector<double> high);
  int out_dim() const {
    return kind == ActionKind::Discrete ? n_actions
                                        : static_cast<int>(low.size());
  }
};

// Two-layer feed-forward policy: obs -> hidden (tanh) -> action head.
struct MlpPolicy {
  int obs_dim = 0;
  int hidden_dim = 16;
  ActionSpec action_spec;
};

struct Action {
  ActionKind kind = ActionKind::Discrete;
  int index = 0;                 // discrete choice
  std::vector<double> values;    // continuous action vector
};

// Scratch buffers so rollouts do not allocate per step.
struct Workspace {
  std::vector<double> hidden;
  std::vector<double> out;
};

// (obs_dim + 1) * hidden_dim + (hidden_dim + 1) * out_dim.
int param_count(const MlpPolicy& policy);

// Flat parameter layout: W1 row-major (hidden x obs), b1, W2 row-major
// (out x hidden), b2. `forward` fills ws.hidden and ws.out.
void forward(const MlpPolicy& policy, const double* theta, const double* obs,
             Workspace& ws);

// argmax over logits, lowest index on ties.
int discrete_action(const double* logits, int n);

// low + (tanh(out) + 1)/2 * (high - low), elementwise.
void continuous_action(const ActionSpec& spec, const double* out,
                       std::vector<double>& action);

// Full action selection; validates theta/obs lengths.
Action act(const MlpPolicy& policy, const std::vector<double>& theta,
           const std::vector<double>& obs);

// Entries ~ N(0, 1/fan_in) per layer (biases included, fan_in of their
// layer); draw order matches the flat layout.
std::vector<double> init_params(const MlpPolicy& policy, std::uint64_t seed);

// Binary checkpoint: "DGSPARAM" magic, version, shape metadata, then the
// parameters as little-endian 64-bit reals.
void save_params(const std::string& path, const MlpPolicy& policy,
                 const std::vector<double>& theta);
std::vector<double> load_params(const std::string& path,
                                const MlpPolicy& policy);

}  // namespace dgs::policy
