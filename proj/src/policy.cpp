#include "dgs/policy.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "dgs/errors.hpp"
#include "dgs/kernels.hpp"
#include "dgs/rng.hpp"

namespace dgs::policy {

ActionSpec ActionSpec::discrete(int n_actions) {
  if (n_actions < 1) throw InvalidArgument("ActionSpec: n_actions must be >= 1");
  ActionSpec spec;
  spec.kind = ActionKind::Discrete;
  spec.n_actions = n_actions;
  return spec;
}

ActionSpec ActionSpec::continuous(std::vector<double> low,
                                  std::vector<double> high) {
  if (low.empty() || low.size() != high.size()) {
    throw InvalidArgument("ActionSpec: low/high must be nonempty, same length");
  }
  for (std::size_t i = 0; i < low.size(); ++i) {
    if (!(low[i] < high[i])) {
      throw InvalidArgument("ActionSpec: low must be < high elementwise");
    }
  }
  ActionSpec spec;
  spec.kind = ActionKind::Continuous;
  spec.low = std::move(low);
  spec.high = std::move(high);
  return spec;
}

int param_count(const MlpPolicy& policy) {
  const int out = policy.action_spec.out_dim();
  return (policy.obs_dim + 1) * policy.hidden_dim +
         (policy.hidden_dim + 1) * out;
}

void forward(const MlpPolicy& policy, const double* theta, const double* obs,
             Workspace& ws) {
  const int in = policy.obs_dim;
  const int h = policy.hidden_dim;
  const int out = policy.action_spec.out_dim();
  ws.hidden.resize(h);
  ws.out.resize(out);

  const double* w1 = theta;                  // h x in, row-major
  const double* b1 = w1 + static_cast<std::size_t>(h) * in;
  const double* w2 = b1 + h;                 // out x h, row-major
  const double* b2 = w2 + static_cast<std::size_t>(out) * h;

  for (int i = 0; i < h; ++i) {
    ws.hidden[i] = kernels::dot(in, w1 + static_cast<std::size_t>(i) * in, obs) + b1[i];
  }
  kernels::tanh_inplace(h, ws.hidden.data());
  for (int k = 0; k < out; ++k) {
    ws.out[k] =
        kernels::dot(h, w2 + static_cast<std::size_t>(k) * h, ws.hidden.data()) + b2[k];
  }
}

int discrete_action(const double* logits, int n) {
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

void continuous_action(const ActionSpec& spec, const double* out,
                       std::vector<double>& action) {
  const int n = spec.out_dim();
  action.resize(n);
  for (int i = 0; i < n; ++i) {
    double squashed = std::tanh(out[i]);
    action[i] = spec.low[i] + (squashed + 1.0) * 0.5 * (spec.high[i] - spec.low[i]);
  }
}

Action act(const MlpPolicy& policy, const std::vector<double>& theta,
           const std::vector<double>& obs) {
  if (static_cast<int>(obs.size()) != policy.obs_dim) {
    throw InvalidArgument("act: observation length does not match obs_dim");
  }
  if (static_cast<int>(theta.size()) != param_count(policy)) {
    throw InvalidArgument("act: parameter length does not match param_count");
  }
  Workspace ws;
  forward(policy, theta.data(), obs.data(), ws);
  Action a;
  a.kind = policy.action_spec.kind;
  if (a.kind == ActionKind::Discrete) {
    a.index = discrete_action(ws.out.data(), policy.action_spec.n_actions);
  } else {
    continuous_action(policy.action_spec, ws.out.data(), a.values);
  }
  return a;
}

std::vector<double> init_params(const MlpPolicy& policy, std::uint64_t seed) {
  const int in = policy.obs_dim;
  const int h = policy.hidden_dim;
  const int out = policy.action_spec.out_dim();
  std::vector<double> theta(param_count(policy));
  rng::SplitMix64 gen(seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
  std::size_t p = 0;
  for (int i = 0; i < h * in; ++i) theta[p++] = s1 * gen.normal();
  for (int i = 0; i < h; ++i) theta[p++] = s1 * gen.normal();
  for (int i = 0; i < out * h; ++i) theta[p++] = s2 * gen.normal();
  for (int i = 0; i < out; ++i) theta[p++] = s2 * gen.normal();
  return theta;
}

namespace {

void put_u32le(std::ofstream& f, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  f.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64le(std::ofstream& f, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  f.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32le(std::ifstream& f) {
  unsigned char b[4];
  f.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64le(std::ifstream& f) {
  unsigned char b[8];
  f.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_params(const std::string& path, const MlpPolicy& policy,
                 const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != param_count(policy)) {
    throw InvalidArgument("save_params: parameter length mismatch");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("save_params: cannot open " + path);
  f.write("DGSPARAM", 8);
  put_u32le(f, 1);  // format version
  put_u32le(f, static_cast<std::uint32_t>(policy.obs_dim));
  put_u32le(f, static_cast<std::uint32_t>(policy.hidden_dim));
  put_u32le(f, policy.action_spec.kind == ActionKind::Discrete ? 0u : 1u);
  put_u32le(f, static_cast<std::uint32_t>(policy.action_spec.out_dim()));
  put_u64le(f, theta.size());
  for (double x : theta) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64le(f, bits);
  }
  if (!f) throw InvalidArgument("save_params: write failed for " + path);
}

std::vector<double> load_params(const std::string& path,
                                const MlpPolicy& policy) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("load_params: cannot open " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "DGSPARAM", 8) != 0) {
    throw InvalidArgument("load_params: bad magic in " + path);
  }
  std::uint32_t version = get_u32le(f);
  if (version != 1) throw InvalidArgument("load_params: unsupported version");
  std::uint32_t obs = get_u32le(f);
  std::uint32_t hidden = get_u32le(f);
  std::uint32_t kind = get_u32le(f);
  std::uint32_t out = get_u32le(f);
  std::uint64_t n = get_u64le(f);
  if (obs != static_cast<std::uint32_t>(policy.obs_dim) ||
      hidden != static_cast<std::uint32_t>(policy.hidden_dim) ||
      kind != (policy.action_spec.kind == ActionKind::Discrete ? 0u : 1u) ||
      out != static_cast<std::uint32_t>(policy.action_spec.out_dim()) ||
      n != static_cast<std::uint64_t>(param_count(policy))) {
    throw InvalidArgument("load_params: checkpoint shape does not match policy");
  }
  std::vector<double> theta(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t bits = get_u64le(f);
    std::memcpy(&theta[i], &bits, 8);
  }
  if (!f) throw InvalidArgument("load_params: truncated file " + path);
  return theta;
}

}  // namespace dgs::policy
