#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace costar {

// Normalized probability vector over K >= 2 classes; the currency every
// module trades in. `checked` validates the invariants (entries >= 0,
// sum within 1e-9 of 1); `trusted` skips validation for values that are
// normalized by construction (softmax outputs, convex mixtures).
class ProbDist {
 public:
  ProbDist() = default;

  static ProbDist checked(std::vector<double> p);
  static ProbDist trusted(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  // Lowest index wins ties.
  std::size_t argmax() const;
  double max_value() const;

 private:
  explicit ProbDist(std::vector<double> p) : p_(std::move(p)) {}
  std::vector<double> p_;
};

// Pre-softmax scores. Finite by construction.
struct Logits {
  std::vector<double> values;
  static Logits checked(std::vector<double> v);
};

// Temperature softmax with max-subtraction. temperature > 0.
ProbDist softmax(std::span<const double> logits, double temperature);
ProbDist softmax(const Logits& logits, double temperature);

// KL(p || q) with q floored at 1e-12 before the log and the 0*log(0) = 0
// convention for p. Result clamped at 0 (flooring q can otherwise produce
// a tiny negative for near-identical inputs).
double kl_div(const ProbDist& p, const ProbDist& q);

// (KL(p||q) + KL(q||p)) / 2.
double sym_kl(const ProbDist& p, const ProbDist& q);

inline constexpr double kKlFloor = 1e-12;

}  // namespace costar
