#include "costar/oracle.hpp"

#include <cmath>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"
#include "costar/rng.hpp"

namespace costar {

void TemplateOracle::validate() const {
  if (num_classes < 2) throw InvalidConfig("oracle: num_classes must be >= 2");
  if (dim < 1) throw InvalidConfig("oracle: dim must be >= 1");
  if (templates_per_class < 1) {
    throw InvalidConfig("oracle: templates_per_class must be >= 1");
  }
  if (!(temperature > 0.0)) throw InvalidConfig("oracle: tau_c must be > 0");
  if (!(logit_scale > 0.0)) throw InvalidConfig("oracle: logit_scale must be > 0");
  if (templates.size() != static_cast<std::size_t>(num_classes) *
                              templates_per_class * dim) {
    throw InvalidConfig("oracle: template array has wrong size");
  }
  for (double t : templates) {
    if (!std::isfinite(t)) throw InvalidConfig("oracle: templates must be finite");
  }
}

ProbDist oracle_predict(const TemplateOracle& oracle,
                        std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(oracle.dim)) {
    throw ShapeMismatch("oracle_predict: feature vector has wrong dimension");
  }
  const auto& kern = kernels::active();
  const double xnorm = std::sqrt(kern.dot(x.data(), x.data(), x.size()));
  if (xnorm == 0.0) {
    return ProbDist::trusted(std::vector<double>(
        oracle.num_classes, 1.0 / oracle.num_classes));
  }

  std::vector<double> scores(oracle.num_classes);
  for (int c = 0; c < oracle.num_classes; ++c) {
    double acc = 0.0;
    for (int t = 0; t < oracle.templates_per_class; ++t) {
      const auto tpl = oracle.template_at(c, t);
      const double tnorm =
          std::sqrt(kern.dot(tpl.data(), tpl.data(), tpl.size()));
      if (tnorm == 0.0) continue;
      const double cosine =
          kern.dot(x.data(), tpl.data(), x.size()) / (xnorm * tnorm);
      acc += oracle.logit_scale * cosine;
    }
    scores[c] = acc / oracle.templates_per_class;
  }
  return softmax(scores, oracle.temperature);
}

TemplateOracle make_oracle(const DomainSpec& spec, const ShiftSpec& shift,
                           int templates_per_class, double perturbation_scale,
                           double logit_scale, double temperature,
                           std::uint64_t seed) {
  spec.validate();
  shift.validate();
  if (templates_per_class < 1) {
    throw InvalidConfig("oracle: templates_per_class must be >= 1");
  }

  TemplateOracle oracle;
  oracle.num_classes = spec.num_classes;
  oracle.dim = spec.feature_dim;
  oracle.templates_per_class = templates_per_class;
  oracle.logit_scale = logit_scale;
  oracle.temperature = temperature;
  oracle.templates.reserve(static_cast<std::size_t>(spec.num_classes) *
                           templates_per_class * spec.feature_dim);

  RngStream rng(seed, StreamId::Oracle);
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto& src = spec.class_means[c];
    const std::vector<double> tgt = shifted_mean(src, shift);
    for (int t = 0; t < templates_per_class; ++t) {
      for (int j = 0; j < spec.feature_dim; ++j) {
        const double mid = 0.5 * (src[j] + tgt[j]);
        oracle.templates.push_back(mid +
                                   perturbation_scale * rng.next_normal());
      }
    }
  }
  oracle.validate();
  return oracle;
}

}  // namespace costar
