#include "dgs/quadrature.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "dgs/errors.hpp"

namespace dgs::quadrature {

std::pair<double, double> hermite_eval(int order, double v) {
  if (order < 0) throw InvalidArgument("hermite_eval: order must be >= 0");
  double prev = 0.0;  // H_{k-1}
  double cur = 1.0;   // H_0
  for (int k = 0; k < order; ++k) {
    double next = 2.0 * v * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return {cur, 2.0 * order * prev};
}

QuadratureRule build_gauss_hermite(int order) {
  if (order < 1 || order > 64) {
    throw InvalidArgument("build_gauss_hermite: order must be in [1, 64]");
  }
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);

  // Positive roots, largest first, via Newton from asymptotic guesses.
  const int half = (order + 1) / 2;
  std::vector<double> root(half, 0.0);
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * order + 1.0) -
          1.85575 * std::pow(2.0 * order + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(order), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * root[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * root[1];
    } else {
      z = 2.0 * z - root[i - 2];
    }
    for (int it = 0; it < 100; ++it) {
      auto [h, dh] = hermite_eval(order, z);
      double dz = h / dh;
      z -= dz;
      if (std::abs(dz) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    root[i] = z;
  }
  // The innermost root of an odd rule is exactly 0 by symmetry.
  if (order % 2 == 1) root[half - 1] = 0.0;

  const double log_sqrt_pi = 0.5 * std::log(std::numbers::pi);
  for (int i = 0; i < half; ++i) {
    double v = root[i];
    auto [h, dh] = hermite_eval(order, v);
    (void)h;
    double logw = (order + 1) * std::numbers::ln2 + std::lgamma(order + 1.0) +
                  log_sqrt_pi - 2.0 * std::log(std::abs(dh));
    double w = std::exp(logw);
    // Mirror so symmetric entries are bit-identical.
    rule.nodes[order - 1 - i] = v;
    rule.nodes[i] = -v;
    rule.weights[order - 1 - i] = w;
    rule.weights[i] = w;
  }
  return rule;
}

}  // namespace dgs::quadrature
