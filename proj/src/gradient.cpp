#include "dgs/gradient.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dgs/errors.hpp"
#include "dgs/kernels.hpp"
#include "dgs/rng.hpp"

namespace dgs::gradient {

namespace {
const double kSqrt2 = std::sqrt(2.0);
const double kSqrtPi = std::sqrt(std::numbers::pi);
}  // namespace

std::uint64_t node_seed(std::uint64_t base_seed, int direction, int node) {
  return rng::seed_hash(base_seed, static_cast<std::uint64_t>(direction),
                        static_cast<std::uint64_t>(node));
}

double node_scale(double sigma, double node) { return (kSqrt2 * sigma) * node; }

void eval_point(const double* theta, int n, const double* xi, double scale,
                double* out) {
  kernels::scale_add(n, theta, scale, xi, out);
}

double reduce_directional(const quadrature::QuadratureRule& rule,
                          const double* point_values, double sigma) {
  double acc = 0.0;
  for (int m = 0; m < rule.order; ++m) {
    acc += (rule.weights[m] * point_values[m]) * (kSqrt2 * rule.nodes[m]);
  }
  return acc / (kSqrtPi * sigma);
}

void assemble_gradient(const directions::DirectionMatrix& frame,
                       const double* directional, double* gradient_out) {
  for (int i = 0; i < frame.dim; ++i) {
    kernels::axpy(frame.dim, directional[i], frame.row(i), gradient_out);
  }
}

DirectionalResult dgs_directional_derivative(
    const ObjectiveHandle& f, const std::vector<double>& theta,
    const std::vector<double>& xi, double sigma,
    const quadrature::QuadratureRule& rule,
    const std::vector<std::uint64_t>& seeds) {
  const int d = static_cast<int>(theta.size());
  if (static_cast<int>(xi.size()) != d) {
    throw InvalidArgument("dgs_directional_derivative: xi/theta size mismatch");
  }
  if (!(sigma > 0.0)) {
    throw InvalidArgument("dgs_directional_derivative: sigma must be > 0");
  }
  if (static_cast<int>(seeds.size()) != rule.order) {
    throw InvalidArgument(
        "dgs_directional_derivative: seeds length must equal rule order");
  }
  double norm = std::sqrt(kernels::dot(d, xi.data(), xi.data()));
  if (std::abs(norm - 1.0) > 1e-10) {
    throw InvalidArgument(
        "dgs_directional_derivative: xi must be a unit vector");
  }

  DirectionalResult res;
  res.point_values.assign(rule.order, 0.0);
  std::vector<double> point(d);
  for (int m = 0; m < rule.order; ++m) {
    eval_point(theta.data(), d, xi.data(), node_scale(sigma, rule.nodes[m]),
               point.data());
    try {
      res.point_values[m] = f(point.data(), d, seeds[m]);
    } catch (const std::exception& e) {
      throw EvaluationError("objective evaluation failed at node " +
                                std::to_string(m) + ": " + e.what(),
                            m);
    }
  }
  res.derivative = reduce_directional(rule, res.point_values.data(), sigma);
  return res;
}

GradientEstimate dgs_gradient(const ObjectiveHandle& f,
                              const std::vector<double>& theta,
                              const directions::DirectionMatrix& frame,
                              const directions::SmoothingRadii& radii,
                              const quadrature::QuadratureRule& rule,
                              std::uint64_t base_seed,
                              bool common_random_numbers) {
  const int d = static_cast<int>(theta.size());
  if (frame.dim != d) {
    throw InvalidArgument("dgs_gradient: frame dimension does not match theta");
  }
  if (static_cast<int>(radii.values.size()) != d) {
    throw InvalidArgument("dgs_gradient: radii length does not match theta");
  }
  for (double s : radii.values) {
    if (!(s > 0.0)) throw InvalidArgument("dgs_gradient: radii must be > 0");
  }
  const int order = rule.order;

  GradientEstimate est;
  est.kind = EstimatorKind::DgsQuadrature;
  est.directional_derivatives.assign(d, 0.0);
  est.gradient.assign(d, 0.0);
  est.evaluations_used = static_cast<long long>(order) * d;

  std::vector<double> point(d);
  std::vector<double> values(order);
  for (int i = 0; i < d; ++i) {
    const double sigma = radii.values[i];
    const double* xi = frame.row(i);
    for (int m = 0; m < order; ++m) {
      eval_point(theta.data(), d, xi, node_scale(sigma, rule.nodes[m]),
                 point.data());
      std::uint64_t seed =
          common_random_numbers ? base_seed : node_seed(base_seed, i, m);
      try {
        values[m] = f(point.data(), d, seed);
      } catch (const EvaluationError&) {
        throw;
      } catch (const std::exception& e) {
        throw EvaluationError("objective evaluation failed at task " +
                                  std::to_string(i * order + m) + ": " +
                                  e.what(),
                              i * order + m);
      }
    }
    est.directional_derivatives[i] =
        reduce_directional(rule, values.data(), sigma);
  }
  assemble_gradient(frame, est.directional_derivatives.data(),
                    est.gradient.data());
  return est;
}

GradientEstimate es_gradient_mc(const ObjectiveHandle& f,
                                const std::vector<double>& theta, double sigma,
                                int samples, std::uint64_t rng_seed) {
  const int d = static_cast<int>(theta.size());
  if (samples < 1) throw InvalidArgument("es_gradient_mc: samples must be >= 1");
  if (!(sigma > 0.0)) throw InvalidArgument("es_gradient_mc: sigma must be > 0");

  GradientEstimate est;
  est.kind = EstimatorKind::MonteCarloEs;
  est.gradient.assign(d, 0.0);
  est.evaluations_used = samples;

  rng::SplitMix64 gen(rng_seed);
  std::vector<double> u(d);
  std::vector<double> point(d);
  for (int m = 0; m < samples; ++m) {
    for (int j = 0; j < d; ++j) u[j] = gen.normal();
    kernels::scale_add(d, theta.data(), sigma, u.data(), point.data());
    double fm = f(point.data(), d,
                  rng::seed_hash(rng_seed, static_cast<std::uint64_t>(m)));
    kernels::axpy(d, fm, u.data(), est.gradient.data());
  }
  const double inv = 1.0 / (static_cast<double>(samples) * sigma);
  for (int j = 0; j < d; ++j) est.gradient[j] *= inv;
  return est;
}

}  // namespace dgs::gradient
