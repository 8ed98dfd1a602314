#include "dgs/objectives.hpp"

#include <cmath>
#include <vector>

#include "dgs/envs.hpp"
#include "dgs/errors.hpp"

namespace dgs::objectives {

double multimodal_bump(double x, double y, double cx, double cy, double radius,
                       double height) {
  const double dx = x - cx;
  const double dy = y - cy;
  const double s2 = (dx * dx + dy * dy) / (radius * radius);
  if (s2 >= 1.0) return 0.0;
  return height * std::exp(1.0 - 1.0 / (1.0 - s2));
}

double multimodal_value(double x, double y) {
  return multimodal_bump(x, y, kBump1X, kBump1Y, kBump1R, kBump1H) +
         multimodal_bump(x, y, kBump2X, kBump2Y, kBump2R, kBump2H);
}

ObjectiveHandle synthetic_objective(Kind kind, int dim) {
  if (dim < 1) throw InvalidArgument("synthetic_objective: dim must be >= 1");
  ObjectiveHandle handle;
  handle.dimension = dim;
  switch (kind) {
    case Kind::Sphere:
      handle.spec_string = "syn:sphere:d" + std::to_string(dim);
      handle.evaluate = [](const double* theta, int n, std::uint64_t) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += theta[i] * theta[i];
        return -s;
      };
      break;
    case Kind::ShiftedQuadratic:
      handle.spec_string = "syn:shifted-quadratic:d" + std::to_string(dim);
      handle.evaluate = [](const double* theta, int n, std::uint64_t) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
          double d = theta[i] - std::sin(static_cast<double>(i + 1));
          s += d * d;
        }
        return -s;
      };
      break;
    case Kind::Multimodal2d:
      if (dim != 2) {
        throw InvalidArgument("synthetic_objective: multimodal-2d requires dim=2");
      }
      handle.spec_string = "syn:multimodal-2d:d2";
      handle.evaluate = [](const double* theta, int, std::uint64_t) {
        return multimodal_value(theta[0], theta[1]);
      };
      break;
  }
  return handle;
}

ObjectiveHandle objective_from_spec(const std::string& spec_string) {
  auto fail = [&]() -> ObjectiveHandle {
    throw InvalidArgument("unparseable objective spec '" + spec_string + "'");
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = s.find(':', start);
      if (pos == std::string::npos) {
        parts.push_back(s.substr(start));
        break;
      }
      parts.push_back(s.substr(start, pos - start));
      start = pos + 1;
    }
    return parts;
  };
  auto parse_int = [&](const std::string& s, char prefix) {
    if (s.size() < 2 || s[0] != prefix) fail();
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') fail();
    }
    return std::stoi(s.substr(1));
  };

  std::vector<std::string> parts = split(spec_string);
  if (parts.size() != 3) return fail();
  if (parts[0] == "syn") {
    int dim = parse_int(parts[2], 'd');
    if (parts[1] == "sphere") return synthetic_objective(Kind::Sphere, dim);
    if (parts[1] == "shifted-quadratic") {
      return synthetic_objective(Kind::ShiftedQuadratic, dim);
    }
    if (parts[1] == "multimodal-2d") {
      return synthetic_objective(Kind::Multimodal2d, dim);
    }
    return fail();
  }
  if (parts[0] == "env") {
    int hidden = parse_int(parts[2], 'h');
    envs::EnvSpec env = envs::env_by_name(parts[1]);
    return envs::env_objective(env.id, hidden);
  }
  return fail();
}

}  // namespace dgs::objectives
