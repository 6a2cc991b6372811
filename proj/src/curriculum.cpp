#include "costar/curriculum.hpp"

#include <algorithm>
#include <cmath>

#include "costar/errors.hpp"

namespace costar {

std::string to_string(PaceFunction p) {
  switch (p) {
    case PaceFunction::ReliabilityOnly: return "reliability-only";
    case PaceFunction::Exponential: return "exponential";
    case PaceFunction::Linear: return "linear";
    case PaceFunction::Sigmoid: return "sigmoid";
    case PaceFunction::Stepwise: return "stepwise";
  }
  return "exponential";
}

PaceFunction pace_from_string(const std::string& s) {
  if (s == "reliability-only") return PaceFunction::ReliabilityOnly;
  if (s == "exponential") return PaceFunction::Exponential;
  if (s == "linear") return PaceFunction::Linear;
  if (s == "sigmoid") return PaceFunction::Sigmoid;
  if (s == "stepwise") return PaceFunction::Stepwise;
  throw InvalidConfig(
      "pace must be one of: reliability-only, exponential, linear, sigmoid, "
      "stepwise (got '" + s + "')");
}

void PaceKind::validate() const {
  if (!(beta > 0.0)) throw InvalidConfig("pace beta must be > 0");
  if (steps < 1) throw InvalidConfig("pace steps must be >= 1");
}

void CurriculumConfig::validate() const {
  if (!(alpha > 0.0)) throw InvalidConfig("curriculum alpha must be > 0");
  pace.validate();
}

double reliability_from_divergence(double sym_kl_value, double alpha) {
  if (!(alpha > 0.0)) throw InvalidConfig("curriculum alpha must be > 0");
  if (!(sym_kl_value >= 0.0)) {
    throw InvalidInput("reliability needs a non-negative divergence");
  }
  return std::exp(-alpha * sym_kl_value);
}

double reliability(const ProbDist& p_teach, const ProbDist& p_oracle,
                   double alpha) {
  return reliability_from_divergence(sym_kl(p_teach, p_oracle), alpha);
}

namespace {

double clamp01(double w) { return std::clamp(w, 0.0, 1.0); }

}  // namespace

double pace_weight(double r, double e_frac, const PaceKind& pace) {
  pace.validate();
  if (!(r > 0.0 && r <= 1.0)) {
    throw InvalidInput("pace_weight: reliability must lie in (0, 1]");
  }
  if (!(e_frac >= 0.0 && e_frac <= 1.0)) {
    throw InvalidInput("pace_weight: e_frac must lie in [0, 1]");
  }
  switch (pace.function) {
    case PaceFunction::ReliabilityOnly:
      return clamp01(r);
    case PaceFunction::Exponential: {
      const double s = pace.sign == ExpSign::Growth ? 1.0 : -1.0;
      return clamp01(r * std::exp(s * pace.beta * e_frac));
    }
    case PaceFunction::Linear:
      return clamp01(r * (1.0 + pace.beta * e_frac));
    case PaceFunction::Sigmoid: {
      const double r_eqv = r * (1.0 - r);
      const double sig =
          1.0 / (1.0 + std::exp(-pace.beta * (12.0 * e_frac - 6.0)));
      return clamp01(r_eqv + sig);
    }
    case PaceFunction::Stepwise: {
      const double n = static_cast<double>(pace.steps);
      return clamp01(r + std::floor(n * e_frac) * (1.0 - r) / n);
    }
  }
  throw InvalidConfig("unknown pace function");
}

}  // namespace costar
