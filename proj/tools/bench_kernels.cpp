// Micro-benchmark for the kernel backends: ns/element for each primitive,
// scalar vs the best SIMD variant. Informational only; not part of ctest.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "costar/kernels.hpp"
#include "costar/rng.hpp"

using namespace costar;
using Clock = std::chrono::steady_clock;

namespace {

volatile double sink = 0.0;

double time_ns_per_elem(std::size_t n, int iters,
                        const std::function<void()>& body) {
  body();  // warm up
  const auto start = Clock::now();
  for (int i = 0; i < iters; ++i) body();
  const double ns =
      std::chrono::duration<double, std::nano>(Clock::now() - start).count();
  return ns / (static_cast<double>(iters) * static_cast<double>(n));
}

void bench_backend(const kernels::Backend& k, std::size_t n, int iters) {
  RngStream rng(1, StreamId::Data);
  std::vector<double> a(n);
  std::vector<double> b(n);
  std::vector<double> out(n);
  std::vector<double> m(n, 0.0);
  std::vector<double> v(n, 0.0);
  for (auto& x : a) x = rng.next_normal();
  for (auto& x : b) x = rng.next_normal();

  const kernels::AdamParams params{0.001, 0.9, 0.999, 1e-8, 0.2,
                                   1.0 / (1 - 0.9), 1.0 / (1 - 0.999)};

  const double dot = time_ns_per_elem(
      n, iters, [&] { sink = k.dot(a.data(), b.data(), n); });
  const double sum =
      time_ns_per_elem(n, iters, [&] { sink = k.sum(a.data(), n); });
  const double axpy = time_ns_per_elem(
      n, iters, [&] { k.axpy(1.0001, a.data(), b.data(), n); });
  const double lerp = time_ns_per_elem(
      n, iters, [&] { k.lerp(0.999, a.data(), b.data(), n); });
  const double exps = time_ns_per_elem(n, iters, [&] {
    k.exp_shift_scale(a.data(), 0.5, 0.5, out.data(), n);
  });
  const double adam = time_ns_per_elem(n, iters, [&] {
    k.adamw_update(b.data(), a.data(), m.data(), v.data(), n, params);
  });

  std::printf("%-7s n=%-7zu dot=%6.2f sum=%6.2f axpy=%6.2f lerp=%6.2f "
              "exp=%6.2f adamw=%6.2f\n",
              k.name, n, dot, sum, axpy, lerp, exps, adam);
}

}  // namespace

int main(int argc, char** argv) {
  int iters = argc > 1 ? std::atoi(argv[1]) : 2000;
  std::printf("ns per element (%d iterations per size)\n", iters);
  for (std::size_t n : {8, 64, 1024, 65536}) {
    bench_backend(kernels::scalar_backend(), n, iters);
    if (const kernels::Backend* avx2 = kernels::avx2_backend()) {
      bench_backend(*avx2, n, iters);
    }
  }
  return 0;
}
