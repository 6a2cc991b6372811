#include "costar/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "costar/errors.hpp"
#include "costar/rng.hpp"

namespace costar {

void DomainSpec::validate() const {
  if (num_classes < 2) throw InvalidConfig("datagen: num_classes must be >= 2");
  if (feature_dim < 2) throw InvalidConfig("datagen: feature_dim must be >= 2");
  if (samples_per_class < 1) {
    throw InvalidConfig("datagen: samples_per_class must be >= 1");
  }
  if (!(covariance_scale > 0.0)) {
    throw InvalidConfig("datagen: covariance_scale must be > 0");
  }
  if (class_means.size() != static_cast<std::size_t>(num_classes)) {
    throw InvalidConfig("datagen: need one mean per class");
  }
  for (const auto& m : class_means) {
    if (m.size() != static_cast<std::size_t>(feature_dim)) {
      throw InvalidConfig("datagen: class mean has wrong dimension");
    }
  }
  for (std::size_t i = 0; i < class_means.size(); ++i) {
    for (std::size_t j = i + 1; j < class_means.size(); ++j) {
      if (class_means[i] == class_means[j]) {
        throw InvalidConfig("datagen: class means must be pairwise distinct");
      }
    }
  }
}

void ShiftSpec::validate() const {
  if (!(noise_scale_multiplier > 0.0)) {
    throw InvalidConfig("datagen: noise_scale_multiplier must be > 0");
  }
}

std::vector<double> shifted_mean(std::span<const double> mean,
                                 const ShiftSpec& shift) {
  std::vector<double> out(mean.begin(), mean.end());
  const double c = std::cos(shift.rotation_angle);
  const double s = std::sin(shift.rotation_angle);
  const double x0 = out[0];
  const double x1 = out[1];
  out[0] = c * x0 - s * x1;
  out[1] = s * x0 + c * x1;
  for (std::size_t i = 0; i < out.size() && i < shift.translation.size(); ++i) {
    out[i] += shift.translation[i];
  }
  return out;
}

namespace {

LabeledDataset sample_domain(const std::vector<std::vector<double>>& means,
                             double variance, int samples_per_class,
                             RngStream& rng) {
  const int k = static_cast<int>(means.size());
  const int d = static_cast<int>(means[0].size());
  const double sigma = std::sqrt(variance);
  LabeledDataset data;
  data.dim = d;
  data.features.reserve(static_cast<std::size_t>(k) * samples_per_class * d);
  data.labels.reserve(static_cast<std::size_t>(k) * samples_per_class);
  for (int c = 0; c < k; ++c) {
    for (int s = 0; s < samples_per_class; ++s) {
      for (int j = 0; j < d; ++j) {
        data.features.push_back(means[c][j] + sigma * rng.next_normal());
      }
      data.labels.push_back(c);
    }
  }
  return data;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> make_domain_pair(
    const DomainSpec& spec, const ShiftSpec& shift, std::uint64_t seed) {
  spec.validate();
  shift.validate();

  RngStream source_rng(seed, StreamId::Data, 0);
  RngStream target_rng(seed, StreamId::Data, 1);

  LabeledDataset source = sample_domain(spec.class_means, spec.covariance_scale,
                                        spec.samples_per_class, source_rng);

  std::vector<std::vector<double>> target_means;
  target_means.reserve(spec.class_means.size());
  for (const auto& m : spec.class_means) {
    target_means.push_back(shifted_mean(m, shift));
  }
  LabeledDataset target = sample_domain(
      target_means, spec.covariance_scale * shift.noise_scale_multiplier,
      spec.samples_per_class, target_rng);

  return {std::move(source), std::move(target)};
}

void write_csv(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path.string());
  for (int j = 0; j < data.dim; ++j) {
    out << 'f' << j << ',';
  }
  out << "label\n";
  char buf[40];
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    for (int j = 0; j < data.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      out << buf << ',';
    }
    out << data.labels[i] << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

LabeledDataset read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open for reading: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty csv: " + path.string());
  int dim = 0;
  {
    std::stringstream header(line);
    std::string col;
    while (std::getline(header, col, ',')) {
      if (col != "label") ++dim;
    }
  }
  if (dim < 1) throw InvalidInput("csv has no feature columns");

  LabeledDataset data;
  data.dim = dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    for (int j = 0; j < dim; ++j) {
      if (!std::getline(row, cell, ',')) {
        throw InvalidInput("truncated csv row in " + path.string());
      }
      data.features.push_back(std::stod(cell));
    }
    if (!std::getline(row, cell, ',')) {
      throw InvalidInput("csv row missing label in " + path.string());
    }
    data.labels.push_back(std::stoi(cell));
  }
  return data;
}

}  // namespace costar
