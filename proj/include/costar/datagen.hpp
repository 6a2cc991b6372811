#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace costar {

// Gaussian class-cluster layout for one domain family. covariance_scale is
// the isotropic variance (covariance = scale * I).
struct DomainSpec {
  int num_classes = 0;
  int feature_dim = 0;
  std::vector<std::vector<double>> class_means;  // num_classes x feature_dim
  double covariance_scale = 1.0;
  int samples_per_class = 0;

  void validate() const;
};

// Source -> target shift: rotate the first two feature dims of each class
// mean, translate, and scale the sampling covariance.
struct ShiftSpec {
  double rotation_angle = 0.0;  // radians
  std::vector<double> translation;  // length feature_dim (padded with 0)
  double noise_scale_multiplier = 1.0;

  void validate() const;
};

struct LabeledDataset {
  std::vector<double> features;  // row-major n x dim
  std::vector<int> labels;       // values in [0, num_classes)
  int dim = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
};

// Class mean of the target domain: first two dims rotated, then translated.
std::vector<double> shifted_mean(std::span<const double> mean,
                                 const ShiftSpec& shift);

std::pair<LabeledDataset, LabeledDataset> make_domain_pair(
    const DomainSpec& spec, const ShiftSpec& shift, std::uint64_t seed);

// CSV with header f0,...,f{d-1},label; one row per sample.
void write_csv(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset read_csv(const std::filesystem::path& path);

}  // namespace costar
