#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "costar/acr.hpp"
#include "costar/errors.hpp"
#include "costar/prob.hpp"
#include "costar/rng.hpp"

using namespace costar;

namespace {

ProbDist dist2(double a) { return ProbDist::checked({a, 1.0 - a}); }

// Independent re-derivation of the selection for a known stream: replays
// the same draws (uniforms, then the partial shuffle) by hand.
std::vector<std::size_t> selection_oracle(std::size_t n, double p_inv,
                                          double rho, RngStream rng) {
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.next_unit() < p_inv) cand.push_back(i);
  }
  const auto cap = static_cast<std::size_t>(std::floor(rho * n));
  if (cand.size() <= cap) return cand;
  for (std::size_t j = 0; j < cap; ++j) {
    std::swap(cand[j], cand[j + rng.next_below(cand.size() - j)]);
  }
  cand.resize(cap);
  std::sort(cand.begin(), cand.end());
  return cand;
}

}  // namespace

TEST_CASE("inversion probability worked examples") {
  CHECK(inversion_probability(0.0, 6.0) == 0.0);
  CHECK(inversion_probability(0.5, 6.0) ==
        doctest::Approx(1.0 - std::exp(-3.0)).epsilon(1e-12));
  CHECK(inversion_probability(1.0, 6.0) ==
        doctest::Approx(1.0 - std::exp(-6.0)).epsilon(1e-12));
  CHECK_THROWS_AS(inversion_probability(0.5, 0.0), InvalidConfig);
  CHECK_THROWS_AS(inversion_probability(1.5, 6.0), InvalidInput);
}

TEST_CASE("inversion probability is increasing and bounded") {
  double last = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double p = inversion_probability(i / 100.0, 6.0);
    CHECK(p > last);
    CHECK(p >= 0.0);
    CHECK(p < 1.0);
    last = p;
  }
  CHECK(inversion_probability(0.5, 3.0) < inversion_probability(0.5, 6.0));
}

TEST_CASE("candidate selection worked examples") {
  RngStream zero(1, StreamId::Acr, 0, 0);
  CHECK(select_candidates(32, 0.0, 0.25, zero).empty());

  RngStream all(1, StreamId::Acr, 0, 1);
  const auto everyone = select_candidates(32, 1.0, 1.0, all);
  CHECK(everyone.size() == 32);
  for (std::size_t i = 0; i < 32; ++i) CHECK(everyone[i] == i);

  // p_inv = 1, rho = 0.25, n = 32: exactly floor(8) survive, and membership
  // matches the independently replayed thinning
  RngStream stream(1, StreamId::Acr, 2, 3);
  const auto got = select_candidates(32, 1.0, 0.25, stream);
  CHECK(got.size() == 8);
  const auto want =
      selection_oracle(32, 1.0, 0.25, RngStream(1, StreamId::Acr, 2, 3));
  CHECK(got == want);
}

TEST_CASE("selection equals the oracle replay across random settings") {
  RngStream meta(77, StreamId::Data);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + meta.next_below(64);
    const double p_inv = meta.next_unit();
    const double rho = meta.next_unit();
    const std::uint64_t a = meta.next_u64();
    RngStream s1(9, StreamId::Acr, a, 0);
    RngStream s2(9, StreamId::Acr, a, 0);
    CHECK(select_candidates(n, p_inv, rho, s1) ==
          selection_oracle(n, p_inv, rho, s2));
  }
}

TEST_CASE("selection respects the cap over many randomized calls") {
  RngStream meta(78, StreamId::Data);
  for (int rep = 0; rep < 10000; ++rep) {
    const std::size_t n = 1 + meta.next_below(64);
    const double p_inv = meta.next_unit();
    const double rho = meta.next_unit();
    RngStream stream(10, StreamId::Acr, static_cast<std::uint64_t>(rep), 0);
    const auto s = select_candidates(n, p_inv, rho, stream);
    CHECK(s.size() <= static_cast<std::size_t>(std::floor(rho * n)));
    // indices valid and strictly increasing
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s[i] < n);
      if (i > 0) CHECK(s[i] > s[i - 1]);
    }
  }
}

TEST_CASE("per-sample selection frequency tracks the capped rate") {
  const std::size_t n = 32;
  const double rho = 0.25;
  const int trials = 4000;

  for (double p_inv : {0.1, 0.95}) {
    // expected per-sample rate: E[min(X, 8)]/32 with X ~ Bin(32, p_inv)
    double expected = 0.0;
    {
      double pmf = std::pow(1.0 - p_inv, 32);  // P(X = 0)
      for (int x = 0; x <= 32; ++x) {
        expected += pmf * std::min(x, 8);
        pmf *= (32.0 - x) / (x + 1.0) * p_inv / (1.0 - p_inv);
      }
      expected /= 32.0;
    }

    std::vector<int> hits(n, 0);
    for (int t = 0; t < trials; ++t) {
      RngStream stream(20, StreamId::Acr, static_cast<std::uint64_t>(t),
                       p_inv < 0.5 ? 0 : 1);
      for (std::size_t i : select_candidates(n, p_inv, rho, stream)) {
        ++hits[i];
      }
    }
    const double band =
        4.0 * std::sqrt(expected * (1.0 - expected) / trials);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(hits[i] / static_cast<double>(trials) - expected) <
            band);
    }
  }
}

TEST_CASE("history buffer is a fifo with bounded length") {
  HistoryBuffer buf(10);
  for (int i = 0; i < 12; ++i) {
    buf.push(dist2(i / 100.0));
    CHECK(buf.size() == static_cast<std::size_t>(std::min(i + 1, 10)));
  }
  // after pushes p1..p12 with h = 10, stored = p3..p12
  for (int i = 0; i < 10; ++i) {
    CHECK(buf.at(i)[0] == doctest::Approx((i + 2) / 100.0).epsilon(1e-15));
  }

  HistoryBuffer single(3);
  single.push(dist2(0.5));
  CHECK(single.size() == 1);

  CHECK_THROWS_AS(HistoryBuffer(0), InvalidConfig);
}

TEST_CASE("stability divergence against the history mean") {
  const AcrConfig cfg;

  HistoryBuffer empty(10);
  CHECK(!stability_kl(dist2(0.5), empty, cfg.min_history).has_value());

  HistoryBuffer one(10);
  one.push(dist2(0.5));
  CHECK(!stability_kl(dist2(0.5), one, cfg.min_history).has_value());

  // h identical copies of the current distribution: zero divergence
  HistoryBuffer same(10);
  for (int i = 0; i < 10; ++i) same.push(dist2(0.37));
  const auto zero = stability_kl(dist2(0.37), same, cfg.min_history);
  REQUIRE(zero.has_value());
  CHECK(*zero < 1e-12);

  // mean of {[0.9, 0.1], [0.7, 0.3]} is [0.8, 0.2]
  HistoryBuffer two(10);
  two.push(dist2(0.9));
  two.push(dist2(0.7));
  const auto matched = stability_kl(dist2(0.8), two, cfg.min_history);
  REQUIRE(matched.has_value());
  CHECK(*matched < 1e-15);

  const auto moved = stability_kl(dist2(0.5), two, cfg.min_history);
  REQUIRE(moved.has_value());
  CHECK(*moved ==
        doctest::Approx(kl_div(dist2(0.5), dist2(0.8))).epsilon(1e-12));
}

TEST_CASE("weight adjustment worked examples") {
  AcrConfig cfg;

  // lambda = 0 fires but preserves the weight
  cfg.lambda = 0.0;
  auto [w0, fired0] = adjust_weight(0.3, 0.1, std::nullopt, cfg, 0.9);
  CHECK(fired0);
  CHECK(w0 == 0.3);

  // lambda = 1 is full inversion
  cfg.lambda = 1.0;
  auto [w1, fired1] = adjust_weight(0.3, 0.1, std::nullopt, cfg, 0.9);
  CHECK(fired1);
  CHECK(w1 == doctest::Approx(0.7).epsilon(1e-15));

  // stable overconfident branch
  cfg.lambda = 0.2;
  auto [w2, fired2] = adjust_weight(0.9, 0.95, 0.01, cfg, 0.9);
  CHECK(fired2);
  CHECK(w2 == doctest::Approx(0.74).epsilon(1e-12));

  // low confidence fires regardless of stability
  auto [w3, fired3] = adjust_weight(0.9, 0.5, 10.0, cfg, 0.9);
  CHECK(fired3);
  auto [w4, fired4] = adjust_weight(0.9, 0.5, std::nullopt, cfg, 0.9);
  CHECK(fired4);
  CHECK(w3 == w4);

  // confident and unstable: untouched
  auto [w5, fired5] = adjust_weight(0.9, 0.95, 0.2, cfg, 0.9);
  CHECK(!fired5);
  CHECK(w5 == 0.9);

  // no history disables only the stability branch
  auto [w6, fired6] = adjust_weight(0.9, 0.95, std::nullopt, cfg, 0.9);
  CHECK(!fired6);
  CHECK(w6 == 0.9);
}

TEST_CASE("double application with lambda = 1 restores the weight") {
  AcrConfig cfg;
  cfg.lambda = 1.0;
  RngStream rng(79, StreamId::Data);
  for (int rep = 0; rep < 1000; ++rep) {
    const double w = rng.next_unit();
    auto [w1, f1] = adjust_weight(w, 0.1, std::nullopt, cfg, 0.9);
    REQUIRE(f1);
    auto [w2, f2] = adjust_weight(w1, 0.1, std::nullopt, cfg, 0.9);
    REQUIRE(f2);
    CHECK(w2 == doctest::Approx(w).epsilon(1e-15));
  }
}

TEST_CASE("adjusted weights stay in [0, 1]") {
  RngStream rng(80, StreamId::Data);
  for (int rep = 0; rep < 10000; ++rep) {
    AcrConfig cfg;
    cfg.lambda = rng.next_unit();
    const double w = rng.next_unit();
    const double c = rng.next_unit();
    const double gamma = rng.next_unit();
    const std::optional<double> d_kl =
        rng.next_below(3) == 0 ? std::nullopt
                               : std::optional<double>(0.2 * rng.next_unit());
    const auto [w_out, fired] = adjust_weight(w, c, d_kl, cfg, gamma);
    CHECK(w_out >= 0.0);
    CHECK(w_out <= 1.0);
    if (!fired) CHECK(w_out == w);
  }
}

TEST_CASE("the high-confidence branch never fires at the gamma fallback") {
  const AcrConfig cfg;
  const double gamma = 1.0;  // empty agreement set fallback
  RngStream rng(81, StreamId::Data);
  for (int rep = 0; rep < 2000; ++rep) {
    const double c = rng.next_unit();
    const double d_kl = 0.01 * rng.next_unit();  // always "stable"
    const auto [w_out, fired] = adjust_weight(0.8, c, d_kl, cfg, gamma);
    // any firing must come from the low-confidence branch
    if (fired) CHECK(c < gamma);
  }
  const auto [w_at_one, fired_at_one] =
      adjust_weight(0.8, 1.0, 0.0, cfg, gamma);
  CHECK(!fired_at_one);
  CHECK(w_at_one == 0.8);
}

TEST_CASE("acr config validation") {
  AcrConfig cfg;
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = AcrConfig{};
  cfg.rho = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = AcrConfig{};
  cfg.lambda = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  cfg = AcrConfig{};
  cfg.history = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidConfig);
  CHECK_NOTHROW(AcrConfig{}.validate());
}
