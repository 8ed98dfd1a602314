#pragma once

#include <cstdint>
#include <vector>

namespace dgs::directions {

// Orthonormal search frame, stored row-major: row i is the i-th direction.
struct DirectionMatrix {
  int dim = 0;
  std::vector<double> rows;  // dim * dim, row-major

  const double* row(int i) const { return rows.data() + static_cast<std::size_t>(i) * dim; }
  double* row(int i) { return rows.data() + static_cast<std::size_t>(i) * dim; }
};

// Per-direction smoothing radii.
struct SmoothingRadii {
  std::vector<double> values;
};

enum class PerturbMode { Replace, Compose };

// Identity frame: row i is the i-th coordinate basis vector.
DirectionMatrix init_frame(int dim);

// Draws a skew-symmetric matrix with independent upper-triangle entries
// uniform on [-alpha, alpha] (row-major draw order), mirrored with negation
// to the lower triangle.
std::vector<double> skew_perturbation(int dim, double alpha, std::uint64_t seed);

// Orthonormalizes the columns of a (I + skew) via Householder QR and returns
// the frame whose rows are the columns of Q, with the decomposition made
// unique by requiring a positive diagonal of R (columns of Q flipped where
// the diagonal entry comes out negative).
DirectionMatrix qr_orthonormalize(const std::vector<double>& a, int dim);

// New random orthonormal frame: QR of (I + skew(alpha, seed)).
// Replace mode returns that frame directly; Compose mode returns its product
// with the previous frame (new rows expressed through the old ones).
DirectionMatrix perturb_frame(const DirectionMatrix& frame, double alpha,
                              std::uint64_t seed,
                              PerturbMode mode = PerturbMode::Replace);

// Radii drawn independently uniform on [radius - spread, radius + spread],
// in index order. Requires radius - spread > 0.
SmoothingRadii sample_radii(int dim, double radius, double spread,
                            std::uint64_t seed);

// max_{i,j} |(Xi Xi^T - I)_{ij}|, a cheap orthonormality diagnostic.
double orthonormality_defect(const DirectionMatrix& frame);

}  // namespace dgs::directions
