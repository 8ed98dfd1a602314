#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dgs/directions.hpp"
#include "dgs/objective.hpp"
#include "dgs/quadrature.hpp"

namespace dgs::gradient {

enum class EstimatorKind { DgsQuadrature, MonteCarloEs };

struct GradientEstimate {
  std::vector<double> gradient;
  // Per-direction smoothed derivatives (empty for the Monte-Carlo estimator);
  // gradient reconstructs as frame^T * directional_derivatives.
  std::vector<double> directional_derivatives;
  long long evaluations_used = 0;
  EstimatorKind kind = EstimatorKind::DgsQuadrature;
};

struct DirectionalResult {
  double derivative = 0.0;
  std::vector<double> point_values;  // objective value at each node, ascending
};

// Evaluation seed for quadrature node `node` on direction `direction`.
std::uint64_t node_seed(std::uint64_t base_seed, int direction, int node);

// Scale applied to a unit direction to reach a quadrature node:
// (sqrt(2) * sigma) * node. The exact grouping matters: local and
// worker-process evaluations both use this function so points match bitwise.
double node_scale(double sigma, double node);

// out = theta + scale * xi, the single code path for building evaluation
// points (shared with the parallel scheduler and worker processes).
void eval_point(const double* theta, int n, const double* xi, double scale,
                double* out);

// Quadrature reduction of one direction's point values to the smoothed
// directional derivative: sum_m (w_m * f_m) * (sqrt(2) * v_m), divided by
// (sqrt(pi) * sigma). Accumulation runs in ascending node order.
double reduce_directional(const quadrature::QuadratureRule& rule,
                          const double* point_values, double sigma);

// gradient_out += sum_i directional[i] * frame.row(i), rows in ascending
// order (gradient_out must be zero-initialized by the caller).
void assemble_gradient(const directions::DirectionMatrix& frame,
                       const double* directional, double* gradient_out);

// Smoothed derivative of f along unit direction xi at theta, by Gauss-Hermite
// quadrature. seeds[m] is the evaluation seed for node m.
DirectionalResult dgs_directional_derivative(
    const ObjectiveHandle& f, const std::vector<double>& theta,
    const std::vector<double>& xi, double sigma,
    const quadrature::QuadratureRule& rule,
    const std::vector<std::uint64_t>& seeds);

// Full smoothed-gradient estimate over an orthonormal frame with
// per-direction radii; uses order*dim objective evaluations. When
// common_random_numbers is set every evaluation shares base_seed instead of
// the per-node schedule.
GradientEstimate dgs_gradient(const ObjectiveHandle& f,
                              const std::vector<double>& theta,
                              const directions::DirectionMatrix& frame,
                              const directions::SmoothingRadii& radii,
                              const quadrature::QuadratureRule& rule,
                              std::uint64_t base_seed,
                              bool common_random_numbers = false);

// Baseline Monte-Carlo evolution-strategy gradient:
// (1/(samples*sigma)) * sum_m f(theta + sigma*u_m) * u_m, u_m ~ N(0, I).
GradientEstimate es_gradient_mc(const ObjectiveHandle& f,
                                const std::vector<double>& theta, double sigma,
                                int samples, std::uint64_t rng_seed);

}  // namespace dgs::gradient
