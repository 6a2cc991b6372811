#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "costar/prob.hpp"
#include "costar/rng.hpp"

namespace costar {

// Per-sample FIFO of the student's recent predicted distributions.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(int capacity = 10);

  void push(ProbDist p);
  std::size_t size() const { return entries_.size(); }
  int capacity() const { return capacity_; }
  const ProbDist& at(std::size_t i) const { return entries_[i]; }

  // Elementwise mean of the stored distributions; empty buffer not allowed.
  ProbDist mean() const;

 private:
  int capacity_;
  std::deque<ProbDist> entries_;
};

struct AcrConfig {
  double eta = 6.0;     // inversion-probability rate
  double rho = 0.25;    // per-batch selection cap fraction
  double sigma = 0.05;  // stability threshold on the history KL
  double lambda = 0.2;  // inversion strength
  int history = 10;     // h, buffer capacity
  int min_history = 2;  // entries required before the stability branch arms

  void validate() const;
};

// P_inv = 1 - exp(-eta * e_frac), in [0, 1).
double inversion_probability(double e_frac, double eta);

// Candidate set {i : u_i < p_inv} over a batch of n samples, thinned
// uniformly to floor(rho * n) when over capacity. All draws come from the
// caller's stream, so selection is reproducible per (seed, epoch, batch).
std::vector<std::size_t> select_candidates(std::size_t n, double p_inv,
                                           double rho, RngStream& rng);

// KL(current || mean of buffer), or nothing while the buffer holds fewer
// than min_history entries.
std::optional<double> stability_kl(const ProbDist& current,
                                   const HistoryBuffer& buffer,
                                   int min_history);

// Partial weight inversion w' = (1-w)*lambda + w*(1-lambda), applied when
// the prediction is stable-but-overconfident (d_kl < sigma and c > gamma)
// or under-confident (c < gamma). Returns the resulting weight and whether
// the inversion fired.
std::pair<double, bool> adjust_weight(double w, double confidence,
                                      std::optional<double> d_kl,
                                      const AcrConfig& cfg, double gamma);

}  // namespace costar
