// Reference kernels. Deliberately plain loops: these define the semantics
// the SIMD variants are tested against.

#include "costar/kernels.hpp"

#include <cmath>

namespace costar::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_value_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void lerp_scalar(double keep, const double* src, double* dst, std::size_t n) {
  const double take = 1.0 - keep;
  for (std::size_t i = 0; i < n; ++i) dst[i] = keep * dst[i] + take * src[i];
}

void exp_shift_scale_scalar(const double* z, double shift, double inv_t,
                            double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp((z[i] - shift) * inv_t);
}

void adamw_update_scalar(double* w, const double* g, double* m, double* v,
                         std::size_t n, const AdamParams& p) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * (g[i] * g[i]);
    const double mhat = m[i] * p.bias1;
    const double vhat = v[i] * p.bias2;
    w[i] -= p.lr * (mhat / (std::sqrt(vhat) + p.eps) + p.weight_decay * w[i]);
  }
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend table = {
      "scalar",          dot_scalar,  sum_scalar,
      max_value_scalar,  axpy_scalar, scale_scalar,
      lerp_scalar,       exp_shift_scale_scalar,
      adamw_update_scalar,
  };
  return table;
}

}  // namespace costar::kernels
