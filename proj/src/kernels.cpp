#include "dgs/kernels.hpp"

#include <atomic>

#include "dgs/errors.hpp"

namespace dgs::kernels {

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

enum class Forced : int { None = 0, Scalar = 1, Avx2 = 2 };
std::atomic<Forced> g_forced{Forced::None};

}  // namespace

bool avx2_available() {
  static const bool ok = avx2::compiled_in() && cpu_has_avx2_fma();
  return ok;
}

Backend active_backend() {
  switch (g_forced.load(std::memory_order_relaxed)) {
    case Forced::Scalar:
      return Backend::Scalar;
    case Forced::Avx2:
      return Backend::Avx2;
    case Forced::None:
      break;
  }
  return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) {
    throw InvalidArgument("avx2 backend not available on this machine");
  }
  g_forced.store(b == Backend::Avx2 ? Forced::Avx2 : Forced::Scalar,
                 std::memory_order_relaxed);
}

void reset_backend() { g_forced.store(Forced::None, std::memory_order_relaxed); }

void axpy(std::size_t n, double a, const double* x, double* y) {
  if (active_backend() == Backend::Avx2) return avx2::axpy(n, a, x, y);
  scalar::axpy(n, a, x, y);
}

void scale_add(std::size_t n, const double* base, double a, const double* dir,
               double* out) {
  if (active_backend() == Backend::Avx2)
    return avx2::scale_add(n, base, a, dir, out);
  scalar::scale_add(n, base, a, dir, out);
}

double dot(std::size_t n, const double* x, const double* y) {
  if (active_backend() == Backend::Avx2) return avx2::dot(n, x, y);
  return scalar::dot(n, x, y);
}

void tanh_inplace(std::size_t n, double* x) {
  if (active_backend() == Backend::Avx2) return avx2::tanh_inplace(n, x);
  scalar::tanh_inplace(n, x);
}

void adam_update(std::size_t n, double* theta, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
  if (active_backend() == Backend::Avx2) {
    return avx2::adam_update(n, theta, m, v, g, lr, beta1, beta2, eps, bc1, bc2);
  }
  scalar::adam_update(n, theta, m, v, g, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace dgs::kernels
