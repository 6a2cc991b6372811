#pragma once

#include <optional>

#include "costar/config.hpp"
#include "costar/eval.hpp"
#include "costar/trainer.hpp"

#include "json.hpp"

namespace costar {

// Everything a variant run shares for one (config, seed): the generated
// domain pair, the source-trained model (the initial teacher), the frozen
// oracle, and the accuracy bounds.
struct ExperimentSetup {
  LabeledDataset source;
  LabeledDataset target;
  LinearSoftmaxModel source_model;
  TemplateOracle oracle;
  double lb = 0.0;  // source model on target, percent
  double ub = 0.0;  // supervised-on-target model, percent
};

ExperimentSetup prepare_experiment(const RunConfig& cfg);
// Same, but with datasets supplied (e.g. loaded from CSV).
ExperimentSetup prepare_experiment(const RunConfig& cfg, LabeledDataset source,
                                   LabeledDataset target);

struct RunSummary {
  double lb = 0.0;
  double method = 0.0;
  double ub = 0.0;
  std::optional<double> cg;
  std::uint64_t seed = 0;
  Variant variant = Variant::Full;
  double gamma = 1.0;
  std::vector<EpochTrace> traces;  // empty for oracle-only
};

// Runs one ablation variant against a prepared setup. OracleOnly is
// training-free; the others run the adaptation loop.
RunSummary run_variant(const ExperimentSetup& setup, const RunConfig& cfg,
                       Variant variant, const EpochObserver& observer = {});

// {lb, method, ub, cg, seed, variant, config:{...}} with cg null when
// undefined; the embedded config allows exact replay.
nlohmann::json summary_to_json(const RunSummary& summary, const RunConfig& cfg);

double accuracy_of_model(const LinearSoftmaxModel& model,
                         const LabeledDataset& data);
double accuracy_of_oracle(const TemplateOracle& oracle,
                          const LabeledDataset& data);

}  // namespace costar
