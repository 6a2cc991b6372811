#pragma once

#include <cstdint>
#include <cmath>

namespace costar {

// Named sub-streams derived from the single run seed. Every source of
// randomness in a run flows through one of these, so components stay
// deterministic independently of each other (changing the shuffle order
// cannot perturb the generated data, etc.).
enum class StreamId : std::uint64_t {
  Data = 1,
  Init = 2,
  Shuffle = 3,
  Acr = 4,
  Oracle = 5,
};

// Counter-based generator: the i-th value of a stream is a pure function of
// (seed, stream id, key a, key b, i). Fully specified arithmetic, so output
// is identical across platforms and build configurations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id, std::uint64_t a = 0,
            std::uint64_t b = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double next_unit();

  // Uniform integer on [0, bound) without modulo bias; bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  // Standard normal via Box-Muller (second value cached).
  double next_normal();

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

namespace detail {

// splitmix64 finalizer; the de-facto standard 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace detail

inline RngStream::RngStream(std::uint64_t seed, StreamId id, std::uint64_t a,
                            std::uint64_t b) {
  std::uint64_t k = detail::mix64(seed);
  k = detail::mix64(k ^ static_cast<std::uint64_t>(id));
  k = detail::mix64(k ^ a);
  key_ = detail::mix64(k ^ b);
}

inline std::uint64_t RngStream::next_u64() {
  return detail::mix64(key_ + 0x9e3779b97f4a7c15ull * ++counter_);
}

inline double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

inline std::uint64_t RngStream::next_below(std::uint64_t bound) {
  // Rejection sampling keeps the distribution exactly uniform.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r < limit) return r % bound;
  }
}

inline double RngStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = next_unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 6.283185307179586476925286766559 * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

}  // namespace costar
