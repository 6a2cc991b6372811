#include "costar/eval.hpp"

#include <algorithm>

#include "costar/errors.hpp"

namespace costar {

double accuracy(const Classifier& predict, const LabeledDataset& data) {
  if (data.size() == 0) throw InvalidInput("accuracy: dataset is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(data.row(i)) == data.labels[i]) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(data.size());
}

std::optional<double> closed_gap(double method, double lb, double ub) {
  if (lb >= ub) return std::nullopt;
  const double cg = (method - lb) / (ub - lb) * 100.0;
  return std::clamp(cg, 0.0, 100.0);
}

BoundsReport make_bounds_report(double method, double lb, double ub) {
  return BoundsReport{lb, ub, method, closed_gap(method, lb, ub)};
}

}  // namespace costar
