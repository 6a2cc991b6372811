#include "costar/kernels.hpp"

#include "costar/errors.hpp"

namespace costar::kernels {

// Defined in kernels_avx2.cpp (null on non-x86 builds).
const Backend* avx2_backend_table();

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

struct State {
  const Backend* backend;
  Kind kind;
};

State& state() {
  static State s = [] {
    const Backend* avx2 = avx2_backend();
    if (avx2 != nullptr) return State{avx2, Kind::Avx2};
    return State{&scalar_backend(), Kind::Scalar};
  }();
  return s;
}

}  // namespace

const Backend* avx2_backend() {
  if (!cpu_has_avx2()) return nullptr;
  return avx2_backend_table();
}

const Backend& active() { return *state().backend; }

Kind active_kind() { return state().kind; }

Kind select(Kind requested) {
  switch (requested) {
    case Kind::Auto: {
      const Backend* avx2 = avx2_backend();
      state() = avx2 ? State{avx2, Kind::Avx2}
                     : State{&scalar_backend(), Kind::Scalar};
      return state().kind;
    }
    case Kind::Scalar:
      state() = {&scalar_backend(), Kind::Scalar};
      return Kind::Scalar;
    case Kind::Avx2: {
      const Backend* avx2 = avx2_backend();
      if (avx2 == nullptr) {
        throw InvalidConfig("kernel backend 'avx2' not supported on this CPU");
      }
      state() = {avx2, Kind::Avx2};
      return Kind::Avx2;
    }
  }
  throw InvalidConfig("unknown kernel backend");
}

Kind kind_from_name(const std::string& name) {
  if (name == "auto") return Kind::Auto;
  if (name == "scalar") return Kind::Scalar;
  if (name == "avx2") return Kind::Avx2;
  throw InvalidConfig("kernel must be one of: auto, scalar, avx2 (got '" +
                      name + "')");
}

}  // namespace costar::kernels
