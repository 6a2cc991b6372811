#pragma once

#include <string>

#include "costar/prob.hpp"

namespace costar {

// Pace-function family mapping (reliability, training fraction) to the
// CE-vs-KL mixing weight. ReliabilityOnly is the no-pace baseline.
enum class PaceFunction { ReliabilityOnly, Exponential, Linear, Sigmoid, Stepwise };
enum class ExpSign { Growth, Decay };

std::string to_string(PaceFunction p);
PaceFunction pace_from_string(const std::string& s);

struct PaceKind {
  PaceFunction function = PaceFunction::Exponential;
  double beta = 0.6;          // rate parameter (all but Stepwise)
  ExpSign sign = ExpSign::Growth;  // Exponential only
  int steps = 4;              // n, Stepwise only

  void validate() const;
};

struct CurriculumConfig {
  double alpha = 0.5;
  PaceKind pace;

  void validate() const;
};

// r = exp(-alpha * sym_kl), in (0, 1].
double reliability_from_divergence(double sym_kl_value, double alpha);
double reliability(const ProbDist& p_teach, const ProbDist& p_oracle,
                   double alpha);

// Weight in [0, 1] after applying the pace schedule to reliability r at
// training fraction e_frac = e / E.
double pace_weight(double r, double e_frac, const PaceKind& pace);

}  // namespace costar
