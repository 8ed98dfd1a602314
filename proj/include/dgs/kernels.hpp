#pragma once

#include <cstddef>

// Hot numeric loops come in two flavors: a portable scalar reference and an
// AVX2+FMA variant. The dispatcher picks a backend once at startup from CPU
// capabilities; tests pin each backend explicitly and check that the variants
// agree within documented tolerances.
namespace dgs::kernels {

enum class Backend { Scalar, Avx2 };

// True when the AVX2 variant was compiled in and the running CPU supports it.
bool avx2_available();

// Backend used by the dispatching entry points below.
Backend active_backend();
const char* backend_name(Backend b);

// Pin a backend (throws InvalidArgument when unsupported on this machine).
void force_backend(Backend b);
// Back to auto-detection.
void reset_backend();

// y[i] += a * x[i]
void axpy(std::size_t n, double a, const double* x, double* y);
// out[i] = base[i] + a * dir[i]
void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out);
double dot(std::size_t n, const double* x, const double* y);
void tanh_inplace(std::size_t n, double* x);
// Fused Adam update (gradient-ascent sign). m and v are the running first and
// second moments, bc1/bc2 the bias corrections 1-beta1^t and 1-beta2^t:
//   m[i] = beta1*m[i] + (1-beta1)*g[i]
//   v[i] = beta2*v[i] + (1-beta2)*g[i]^2
//   theta[i] += lr * (m[i]/bc1) / (sqrt(v[i]/bc2) + eps)
void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2);

namespace scalar {
void axpy(std::size_t n, double a, const double* x, double* y);
void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out);
double dot(std::size_t n, const double* x, const double* y);
void tanh_inplace(std::size_t n, double* x);
void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2);
}  // namespace scalar

namespace avx2 {
// Compiled to real vector code only when the toolchain supports AVX2+FMA;
// otherwise these forward to the scalar reference (and avx2_available() is
// false). Call through the dispatcher unless testing the variant directly.
bool compiled_in();
void axpy(std::size_t n, double a, const double* x, double* y);
void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out);
double dot(std::size_t n, const double* x, const double* y);
void tanh_inplace(std::size_t n, double* x);
void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2);
}  // namespace avx2

}  // namespace dgs::kernels
