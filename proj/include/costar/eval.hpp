#pragma once

#include <functional>
#include <optional>
#include <span>

#include "costar/datagen.hpp"

namespace costar {

// Argmax predictor: features -> class index.
using Classifier = std::function<int(std::span<const double>)>;

// Fraction of correct argmax predictions, in percent.
double accuracy(const Classifier& predict, const LabeledDataset& data);

// CG = min(100, (method - lb) / (ub - lb) * 100), clamped below at 0;
// undefined (nullopt) when lb >= ub.
std::optional<double> closed_gap(double method, double lb, double ub);

struct BoundsReport {
  double lb = 0.0;      // source-only accuracy on target, percent
  double ub = 0.0;      // supervised-on-target accuracy, percent
  double method = 0.0;  // adapted model accuracy, percent
  std::optional<double> cg;
};

BoundsReport make_bounds_report(double method, double lb, double ub);

}  // namespace costar
