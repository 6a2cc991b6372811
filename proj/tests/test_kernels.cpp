#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"
#include "costar/rng.hpp"

using namespace costar;
using kernels::AdamParams;
using kernels::Backend;

namespace {

std::vector<double> random_vec(std::size_t n, RngStream& rng,
                               double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.next_normal();
  return v;
}

// Sizes covering the vector body and every tail length.
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 15, 16, 33, 67};

double rel_err(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / denom;
}

}  // namespace

TEST_CASE("scalar kernels match hand computation") {
  const Backend& k = kernels::scalar_backend();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(k.dot(a, b, 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
  CHECK(k.sum(a, 3) == 6.0);
  CHECK(k.max_value(b, 3) == 6.0);

  double y[] = {1.0, 1.0, 1.0};
  k.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[2] == 7.0);
  k.scale(0.5, y, 3);
  CHECK(y[0] == 1.5);

  double dst[] = {10.0, 20.0};
  const double src[] = {0.0, 0.0};
  k.lerp(0.75, src, dst, 2);
  CHECK(dst[0] == doctest::Approx(7.5));
  CHECK(dst[1] == doctest::Approx(15.0));

  double out[3];
  k.exp_shift_scale(a, 3.0, 0.5, out, 3);
  CHECK(out[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(out[2] == doctest::Approx(1.0));
}

TEST_CASE("avx2 elementwise kernels are bit-identical to scalar") {
  const Backend* avx2 = kernels::avx2_backend();
  if (avx2 == nullptr) {
    MESSAGE("avx2 not available on this cpu; skipping");
    return;
  }
  const Backend& ref = kernels::scalar_backend();
  RngStream rng(7, StreamId::Data);

  for (std::size_t n : kSizes) {
    const auto x = random_vec(n, rng, 2.0);
    auto y1 = random_vec(n, rng, 2.0);
    auto y2 = y1;

    ref.axpy(1.7, x.data(), y1.data(), n);
    avx2->axpy(1.7, x.data(), y2.data(), n);
    CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

    ref.scale(0.3, y1.data(), n);
    avx2->scale(0.3, y2.data(), n);
    CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

    ref.lerp(0.999, x.data(), y1.data(), n);
    avx2->lerp(0.999, x.data(), y2.data(), n);
    CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

    CHECK(ref.max_value(x.data(), n) == avx2->max_value(x.data(), n));
  }
}

TEST_CASE("avx2 adamw update is bit-identical to scalar") {
  const Backend* avx2 = kernels::avx2_backend();
  if (avx2 == nullptr) return;
  const Backend& ref = kernels::scalar_backend();
  RngStream rng(11, StreamId::Data);
  const AdamParams params{0.001, 0.9, 0.999, 1e-8, 0.2, 1.0 / (1 - 0.9),
                          1.0 / (1 - 0.999)};

  for (std::size_t n : kSizes) {
    auto w1 = random_vec(n, rng);
    auto m1 = random_vec(n, rng, 0.01);
    std::vector<double> v1(n);
    for (auto& x : v1) x = std::fabs(rng.next_normal()) * 0.01;
    const auto g = random_vec(n, rng);
    auto w2 = w1;
    auto m2 = m1;
    auto v2 = v1;

    ref.adamw_update(w1.data(), g.data(), m1.data(), v1.data(), n, params);
    avx2->adamw_update(w2.data(), g.data(), m2.data(), v2.data(), n, params);
    CHECK(std::memcmp(w1.data(), w2.data(), n * sizeof(double)) == 0);
    CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(double)) == 0);
    CHECK(std::memcmp(v1.data(), v2.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("avx2 reductions agree with scalar to rounding") {
  const Backend* avx2 = kernels::avx2_backend();
  if (avx2 == nullptr) return;
  const Backend& ref = kernels::scalar_backend();
  RngStream rng(13, StreamId::Data);

  // reassociation error scales with the sum of magnitudes, not the result
  for (int rep = 0; rep < 200; ++rep) {
    for (std::size_t n : kSizes) {
      const auto a = random_vec(n, rng, 3.0);
      const auto b = random_vec(n, rng, 3.0);
      double dot_mag = 1e-300;
      double sum_mag = 1e-300;
      for (std::size_t i = 0; i < n; ++i) {
        dot_mag += std::fabs(a[i] * b[i]);
        sum_mag += std::fabs(a[i]);
      }
      CHECK(std::fabs(ref.dot(a.data(), b.data(), n) -
                      avx2->dot(a.data(), b.data(), n)) < 1e-14 * dot_mag);
      CHECK(std::fabs(ref.sum(a.data(), n) - avx2->sum(a.data(), n)) <
            1e-14 * sum_mag);
    }
  }
}

TEST_CASE("avx2 vector exp agrees with libm to 1e-13 relative") {
  const Backend* avx2 = kernels::avx2_backend();
  if (avx2 == nullptr) return;

  std::vector<double> args;
  for (double x = -700.0; x <= 700.0; x += 0.37) args.push_back(x);
  args.insert(args.end(), {0.0, 1.0, -1.0, 0.5, -0.5, 1e-12, -1e-12,
                           std::log(2.0), 709.0, -708.0});
  RngStream rng(17, StreamId::Data);
  for (int i = 0; i < 5000; ++i) {
    args.push_back(1400.0 * (rng.next_unit() - 0.5));
  }

  std::vector<double> out(args.size());
  avx2->exp_shift_scale(args.data(), 0.0, 1.0, out.data(), args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    CHECK(rel_err(out[i], std::exp(args[i])) < 1e-13);
  }
}

TEST_CASE("avx2 exp flushes deep underflow to zero") {
  const Backend* avx2 = kernels::avx2_backend();
  if (avx2 == nullptr) return;
  const double args[] = {-710.0, -720.0, -745.0, -800.0, -1e6};
  double out_avx[5];
  double out_ref[5];
  avx2->exp_shift_scale(args, 0.0, 1.0, out_avx, 5);
  kernels::scalar_backend().exp_shift_scale(args, 0.0, 1.0, out_ref, 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(out_avx[i] >= 0.0);
    CHECK(out_avx[i] < 1e-307);
    CHECK(out_ref[i] < 1e-307);
  }
}

TEST_CASE("exp_shift_scale applies shift and inverse temperature") {
  const Backend* backends[] = {&kernels::scalar_backend(),
                               kernels::avx2_backend()};
  RngStream rng(23, StreamId::Data);
  for (const Backend* k : backends) {
    if (k == nullptr) continue;
    for (std::size_t n : kSizes) {
      const auto z = random_vec(n, rng, 5.0);
      std::vector<double> out(n);
      k->exp_shift_scale(z.data(), 1.25, 0.5, out.data(), n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(rel_err(out[i], std::exp((z[i] - 1.25) * 0.5)) < 1e-13);
      }
    }
  }
}

TEST_CASE("backend selection") {
  const kernels::Kind before = kernels::active_kind();

  CHECK(kernels::select(kernels::Kind::Scalar) == kernels::Kind::Scalar);
  CHECK(std::string(kernels::active().name) == "scalar");

  const kernels::Kind best = kernels::select(kernels::Kind::Auto);
  if (kernels::avx2_backend() != nullptr) {
    CHECK(best == kernels::Kind::Avx2);
    CHECK(kernels::select(kernels::Kind::Avx2) == kernels::Kind::Avx2);
  } else {
    CHECK(best == kernels::Kind::Scalar);
    CHECK_THROWS_AS(kernels::select(kernels::Kind::Avx2), InvalidConfig);
  }

  CHECK(kernels::kind_from_name("auto") == kernels::Kind::Auto);
  CHECK(kernels::kind_from_name("scalar") == kernels::Kind::Scalar);
  CHECK(kernels::kind_from_name("avx2") == kernels::Kind::Avx2);
  CHECK_THROWS_AS(kernels::kind_from_name("sse9"), InvalidConfig);

  kernels::select(before);
}

TEST_CASE("rng streams are keyed and reproducible") {
  RngStream a(42, StreamId::Acr, 3, 7);
  RngStream b(42, StreamId::Acr, 3, 7);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }

  RngStream a2(42, StreamId::Acr, 3, 7);
  RngStream c(42, StreamId::Acr, 3, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    if (a2.next_u64() != c.next_u64()) differs = true;
  }
  CHECK(differs);

  RngStream u(1, StreamId::Data);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.next_unit();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }

  RngStream n(2, StreamId::Data);
  double mean = 0.0;
  double var = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const double x = n.next_normal();
    mean += x;
    var += x * x;
  }
  mean /= samples;
  var = var / samples - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.02);

  RngStream bound(3, StreamId::Data);
  for (int i = 0; i < 1000; ++i) {
    CHECK(bound.next_below(7) < 7);
  }
}
