#include "costar/prob.hpp"

#include <algorithm>
#include <cmath>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"

namespace costar {

ProbDist ProbDist::checked(std::vector<double> p) {
  if (p.size() < 2) {
    throw InvalidInput("probability vector needs at least 2 classes");
  }
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidInput("probability entries must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw InvalidInput("probabilities must sum to 1 within 1e-9");
  }
  return ProbDist(std::move(p));
}

ProbDist ProbDist::trusted(std::vector<double> p) {
  return ProbDist(std::move(p));
}

std::size_t ProbDist::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(p_.begin(), p_.end()) - p_.begin());
}

double ProbDist::max_value() const {
  return kernels::active().max_value(p_.data(), p_.size());
}

Logits Logits::checked(std::vector<double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput("logits must be finite");
  }
  return Logits{std::move(v)};
}

ProbDist softmax(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0)) {
    throw InvalidConfig("softmax temperature must be > 0");
  }
  for (double x : logits) {
    if (!std::isfinite(x)) throw InvalidInput("logits must be finite");
  }
  const auto& k = kernels::active();
  const std::size_t n = logits.size();
  std::vector<double> out(n);
  const double shift = k.max_value(logits.data(), n);
  k.exp_shift_scale(logits.data(), shift, 1.0 / temperature, out.data(), n);
  const double total = k.sum(out.data(), n);
  k.scale(1.0 / total, out.data(), n);
  return ProbDist::trusted(std::move(out));
}

ProbDist softmax(const Logits& logits, double temperature) {
  return softmax(std::span<const double>(logits.values), temperature);
}

double kl_div(const ProbDist& p, const ProbDist& q) {
  if (p.size() != q.size()) {
    throw ShapeMismatch("kl_div: distributions differ in length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      acc += p[i] * (std::log(p[i]) - std::log(std::max(q[i], kKlFloor)));
    }
  }
  return std::max(acc, 0.0);
}

double sym_kl(const ProbDist& p, const ProbDist& q) {
  return 0.5 * (kl_div(p, q) + kl_div(q, p));
}

}  // namespace costar
