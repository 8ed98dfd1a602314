#pragma once

#include <utility>
#include <vector>

namespace dgs::quadrature {

// Gauss-Hermite rule for the weight exp(-v^2) on the real line.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;    // ascending; mirror-symmetric about 0
  std::vector<double> weights;  // strictly positive; sum to sqrt(pi)
};

// Physicists' Hermite polynomial: returns (H_order(v), H'_order(v)) computed
// with the three-term recurrence H_{k+1} = 2 v H_k - 2 k H_{k-1} and
// H'_n = 2 n H_{n-1}. order must be >= 0.
std::pair<double, double> hermite_eval(int order, double v);

// Build the rule of the given order (1..64). Nodes are the roots of H_order,
// found by Newton iteration from asymptotic initial guesses; weights are
//   w_m = 2^{order+1} order! sqrt(pi) / H'_order(v_m)^2
// evaluated in log space so the factorial stays finite. The rule integrates
// p(v) e^{-v^2} exactly for polynomials p of degree <= 2*order - 1.
QuadratureRule build_gauss_hermite(int order);

}  // namespace dgs::quadrature
