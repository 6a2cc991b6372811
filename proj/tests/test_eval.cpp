#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <optional>

#include "costar/errors.hpp"
#include "costar/eval.hpp"

using namespace costar;

namespace {

LabeledDataset balanced_dataset(int k, int per_class) {
  LabeledDataset data;
  data.dim = 1;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < per_class; ++i) {
      data.features.push_back(static_cast<double>(c));
      data.labels.push_back(c);
    }
  }
  return data;
}

struct GapCase {
  const char* task;
  double lb, method, ub;
  double cg;  // printed value; negative means undefined
};

// Published closed-gap cells recomputed from their own lb/method/ub rows.
const GapCase kDailyCases[] = {
    {"K->A", 26.5, 28.2, 25.8, -1.0},  {"K->H", 40.0, 55.8, 66.3, 60.1},
    {"K->M", 33.5, 47.3, 57.3, 58.0},  {"M->A", 35.1, 29.0, 25.8, -1.0},
    {"M->H", 54.1, 62.5, 66.3, 68.9},  {"M->K", 63.6, 78.6, 88.4, 60.5},
    {"H->A", 22.8, 28.1, 25.8, 100.0}, {"H->M", 26.3, 48.0, 57.3, 70.0},
    {"H->K", 46.2, 77.1, 88.4, 73.2},  {"A->H", 15.4, 55.0, 66.3, 77.8},
    {"A->M", 16.8, 46.0, 57.3, 72.1},  {"A->K", 20.7, 77.8, 88.4, 84.3},
};

const GapCase kSportsCases[] = {
    {"K->U", 83.3, 91.2, 92.0, 90.8}, {"K->S", 74.3, 80.6, 91.5, 36.6},
    {"S->U", 83.0, 92.8, 92.0, 100.0}, {"S->K", 70.4, 84.6, 88.0, 80.7},
    {"U->K", 46.7, 84.5, 88.0, 91.5}, {"U->S", 44.3, 79.9, 91.5, 75.4},
};

}  // namespace

TEST_CASE("accuracy worked examples") {
  const LabeledDataset data = balanced_dataset(4, 10);

  const Classifier constant = [](std::span<const double>) { return 2; };
  CHECK(accuracy(constant, data) == doctest::Approx(25.0));

  const Classifier perfect = [](std::span<const double> x) {
    return static_cast<int>(x[0]);
  };
  CHECK(accuracy(perfect, data) == 100.0);

  const LabeledDataset empty{.features = {}, .labels = {}, .dim = 1};
  CHECK_THROWS_AS(accuracy(perfect, empty), InvalidInput);
}

TEST_CASE("closed gap endpoints, cap, and clamp") {
  CHECK(closed_gap(40.0, 40.0, 66.3) == doctest::Approx(0.0));
  CHECK(closed_gap(66.3, 40.0, 66.3) == doctest::Approx(100.0));
  CHECK(closed_gap(92.8, 83.0, 92.0) == doctest::Approx(100.0));  // capped
  CHECK(closed_gap(30.0, 40.0, 66.3) == doctest::Approx(0.0));    // clamped
  CHECK(!closed_gap(55.0, 50.0, 50.0).has_value());
  CHECK(!closed_gap(55.0, 60.0, 50.0).has_value());
}

TEST_CASE("closed gap is monotone in the method accuracy") {
  std::optional<double> last;
  for (double method = 30.0; method <= 100.0; method += 0.7) {
    const auto cg = closed_gap(method, 40.0, 66.3);
    REQUIRE(cg.has_value());
    if (last.has_value()) CHECK(*cg >= *last);
    CHECK(*cg >= 0.0);
    CHECK(*cg <= 100.0);
    last = cg;
  }
}

TEST_CASE("published daily benchmark closed-gap row reproduces within 0.1") {
  for (const auto& c : kDailyCases) {
    const auto cg = closed_gap(c.method, c.lb, c.ub);
    if (c.cg < 0.0) {
      CHECK_MESSAGE(!cg.has_value(), c.task);
    } else {
      REQUIRE_MESSAGE(cg.has_value(), c.task);
      CHECK_MESSAGE(std::fabs(*cg - c.cg) <= 0.1, c.task);
    }
  }
}

TEST_CASE("published sports benchmark closed-gap row reproduces within 0.1") {
  for (const auto& c : kSportsCases) {
    const auto cg = closed_gap(c.method, c.lb, c.ub);
    REQUIRE_MESSAGE(cg.has_value(), c.task);
    CHECK_MESSAGE(std::fabs(*cg - c.cg) <= 0.1, c.task);
  }
}

TEST_CASE("bounds report ties the pieces together") {
  const BoundsReport r = make_bounds_report(55.8, 40.0, 66.3);
  CHECK(r.method == 55.8);
  CHECK(r.lb == 40.0);
  CHECK(r.ub == 66.3);
  REQUIRE(r.cg.has_value());
  CHECK(*r.cg == doctest::Approx(60.1).epsilon(0.002));

  const BoundsReport undef = make_bounds_report(28.2, 26.5, 25.8);
  CHECK(!undef.cg.has_value());
}
