#include <cmath>

#include "dgs/kernels.hpp"

namespace dgs::kernels::scalar {

void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + a * dir[i];
}

double dot(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void tanh_inplace(std::size_t n, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    theta[i] += lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace dgs::kernels::scalar
