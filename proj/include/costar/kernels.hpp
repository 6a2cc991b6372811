#pragma once

#include <cstddef>
#include <string>

namespace costar::kernels {

// AdamW step parameters. bias1/bias2 are the precomputed bias-correction
// factors 1/(1-beta1^t) and 1/(1-beta2^t) for the current step t.
struct AdamParams {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double weight_decay;
  double bias1;
  double bias2;
};

// One table per instruction set. Scalar implementations are the reference;
// SIMD variants must agree with them either bit-exactly (pure elementwise
// ops: axpy, scale, lerp, clamp01, adamw_update, max_value) or within a
// small relative tolerance (reassociated reductions and the vector exp).
// tests/test_kernels.cpp enforces both contracts.
struct Backend {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*max_value)(const double* x, std::size_t n);  // n >= 1

  void (*axpy)(double a, const double* x, double* y, std::size_t n);  // y += a*x
  void (*scale)(double a, double* x, std::size_t n);                  // x *= a
  // dst = keep*dst + (1-keep)*src, the EMA update.
  void (*lerp)(double keep, const double* src, double* dst, std::size_t n);
  // out[i] = exp((z[i] - shift) * inv_t)
  void (*exp_shift_scale)(const double* z, double shift, double inv_t,
                          double* out, std::size_t n);
  void (*adamw_update)(double* w, const double* g, double* m, double* v,
                       std::size_t n, const AdamParams& p);
};

enum class Kind { Auto, Scalar, Avx2 };

const Backend& scalar_backend();
// Null when the build or the CPU lacks AVX2.
const Backend* avx2_backend();

// Currently active table. Defaults to the best supported backend.
const Backend& active();

// Select a backend; Auto picks the best supported one. Returns the kind
// actually selected. Throws InvalidConfig for an unsupported request.
Kind select(Kind requested);
Kind active_kind();

Kind kind_from_name(const std::string& name);  // "auto" | "scalar" | "avx2"

}  // namespace costar::kernels
