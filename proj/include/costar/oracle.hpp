#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "costar/datagen.hpp"
#include "costar/prob.hpp"

namespace costar {

// Frozen zero-shot predictor: per class, m template prototypes; prediction
// is softmax over the per-class mean of scaled cosine similarities. Stands
// in for a domain-agnostic vision-language scorer at desk scale.
struct TemplateOracle {
  int num_classes = 0;
  int dim = 0;
  int templates_per_class = 0;
  // row-major num_classes x templates_per_class x dim
  std::vector<double> templates;
  double logit_scale = 1.0;
  double temperature = 0.5;  // tau_c

  std::span<const double> template_at(int cls, int t) const {
    const std::size_t off =
        (static_cast<std::size_t>(cls) * templates_per_class + t) * dim;
    return {templates.data() + off, static_cast<std::size_t>(dim)};
  }

  void validate() const;
};

// Normalize x, score it against unit-normalized templates, average the m
// similarities per class, softmax at tau_c. Zero-norm input yields the
// uniform distribution.
ProbDist oracle_predict(const TemplateOracle& oracle, std::span<const double> x);

// Templates per class: midpoint of the source mean and its shifted target
// mean, plus m independent Gaussian perturbations of the given scale.
TemplateOracle make_oracle(const DomainSpec& spec, const ShiftSpec& shift,
                           int templates_per_class, double perturbation_scale,
                           double logit_scale, double temperature,
                           std::uint64_t seed);

}  // namespace costar
