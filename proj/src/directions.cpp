#include "dgs/directions.hpp"

#include <cmath>
#include <cstddef>

#include "dgs/errors.hpp"
#include "dgs/rng.hpp"

namespace dgs::directions {

DirectionMatrix init_frame(int dim) {
  if (dim < 1) throw InvalidArgument("init_frame: dim must be >= 1");
  DirectionMatrix frame;
  frame.dim = dim;
  frame.rows.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) frame.row(i)[i] = 1.0;
  return frame;
}

std::vector<double> skew_perturbation(int dim, double alpha, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("skew_perturbation: dim must be >= 1");
  if (alpha < 0.0) throw InvalidArgument("skew_perturbation: alpha must be >= 0");
  std::vector<double> s(static_cast<std::size_t>(dim) * dim, 0.0);
  rng::SplitMix64 gen(seed);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      double x = gen.uniform(-alpha, alpha);
      s[static_cast<std::size_t>(i) * dim + j] = x;
      s[static_cast<std::size_t>(j) * dim + i] = -x;
    }
  }
  return s;
}

DirectionMatrix qr_orthonormalize(const std::vector<double>& a, int dim) {
  if (dim < 1) throw InvalidArgument("qr_orthonormalize: dim must be >= 1");
  if (a.size() != static_cast<std::size_t>(dim) * dim) {
    throw InvalidArgument("qr_orthonormalize: matrix size does not match dim");
  }
  const std::size_t n = static_cast<std::size_t>(dim);
  // Householder QR: r starts as a copy of A and is reduced in place; q
  // accumulates the product of reflectors applied to the identity.
  std::vector<double> r(a);
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

  std::vector<double> v(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += r[i * n + k] * r[i * n + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    double akk = r[k * n + k];
    double sign = (akk >= 0.0) ? 1.0 : -1.0;
    // v = x + sign(x_k) * |x| e_k, the standard numerically safe choice.
    for (std::size_t i = k; i < n; ++i) v[i] = r[i * n + k];
    v[k] += sign * norm;
    double vtv = 0.0;
    for (std::size_t i = k; i < n; ++i) vtv += v[i] * v[i];
    if (vtv == 0.0) continue;
    // r <- (I - 2 v v^T / v^T v) r, applied to the trailing columns.
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < n; ++i) dot += v[i] * r[i * n + j];
      double f = 2.0 * dot / vtv;
      for (std::size_t i = k; i < n; ++i) r[i * n + j] -= f * v[i];
    }
    // q <- q (I - 2 v v^T / v^T v), accumulating Q = P_0 P_1 ... P_{n-1}.
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k; j < n; ++j) dot += q[i * n + j] * v[j];
      double f = 2.0 * dot / vtv;
      for (std::size_t j = k; j < n; ++j) q[i * n + j] -= f * v[j];
    }
  }

  // Make the factorization unique: flip the sign of Q's column k wherever
  // R[k][k] < 0, so the diagonal of R is nonnegative.
  DirectionMatrix frame;
  frame.dim = dim;
  frame.rows.assign(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double flip = (r[k * n + k] < 0.0) ? -1.0 : 1.0;
    // Row k of the frame is column k of Q (after the sign fix).
    for (std::size_t i = 0; i < n; ++i) {
      frame.rows[k * n + i] = flip * q[i * n + k];
    }
  }
  return frame;
}

DirectionMatrix perturb_frame(const DirectionMatrix& frame, double alpha,
                              std::uint64_t seed, PerturbMode mode) {
  const int dim = frame.dim;
  if (dim < 1) throw InvalidArgument("perturb_frame: frame must be initialized");
  std::vector<double> a = skew_perturbation(dim, alpha, seed);
  for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i) * dim + i] += 1.0;
  DirectionMatrix fresh = qr_orthonormalize(a, dim);
  if (mode == PerturbMode::Replace) return fresh;

  // Compose: express the fresh rows through the previous frame's rows.
  DirectionMatrix out;
  out.dim = dim;
  out.rows.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) {
      double c = fresh.row(i)[k];
      if (c == 0.0) continue;
      const double* old = frame.row(k);
      double* dst = out.row(i);
      for (int j = 0; j < dim; ++j) dst[j] += c * old[j];
    }
  }
  return out;
}

SmoothingRadii sample_radii(int dim, double radius, double spread,
                            std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("sample_radii: dim must be >= 1");
  if (spread < 0.0) throw InvalidArgument("sample_radii: spread must be >= 0");
  if (radius - spread <= 0.0) {
    throw InvalidArgument("sample_radii: radius - spread must be > 0");
  }
  SmoothingRadii out;
  out.values.assign(dim, 0.0);
  rng::SplitMix64 gen(seed);
  for (int i = 0; i < dim; ++i) {
    out.values[i] = gen.uniform(radius - spread, radius + spread);
  }
  return out;
}

double orthonormality_defect(const DirectionMatrix& frame) {
  const int dim = frame.dim;
  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      double dot = 0.0;
      const double* ri = frame.row(i);
      const double* rj = frame.row(j);
      for (int k = 0; k < dim; ++k) dot += ri[k] * rj[k];
      double target = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(dot - target));
    }
  }
  return worst;
}

}  // namespace dgs::directions
