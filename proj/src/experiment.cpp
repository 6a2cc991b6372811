#include "costar/experiment.hpp"

#include "costar/errors.hpp"
#include "costar/rng.hpp"

namespace costar {

namespace {

// Supervised models get distinct derived seeds so their shuffle streams
// never collide with the adaptation loop's.
LinearSoftmaxModel train_model(const RunConfig& cfg, const LabeledDataset& data,
                               std::uint64_t purpose) {
  RngStream init(cfg.seed, StreamId::Init, purpose);
  LinearSoftmaxModel model =
      LinearSoftmaxModel::zeros(cfg.domain.num_classes, cfg.domain.feature_dim);
  for (auto& v : model.w) v = 0.01 * init.next_normal();

  SourceTrainConfig train_cfg = cfg.source;
  train_cfg.seed = init.next_u64();
  train_supervised(model, data, train_cfg);
  return model;
}

}  // namespace

double accuracy_of_model(const LinearSoftmaxModel& model,
                         const LabeledDataset& data) {
  return accuracy(
      [&](std::span<const double> x) {
        return static_cast<int>(model.forward(x, 1.0).argmax());
      },
      data);
}

double accuracy_of_oracle(const TemplateOracle& oracle,
                          const LabeledDataset& data) {
  return accuracy(
      [&](std::span<const double> x) {
        return static_cast<int>(oracle_predict(oracle, x).argmax());
      },
      data);
}

ExperimentSetup prepare_experiment(const RunConfig& cfg) {
  auto [source, target] = make_domain_pair(cfg.domain, cfg.shift, cfg.seed);
  return prepare_experiment(cfg, std::move(source), std::move(target));
}

ExperimentSetup prepare_experiment(const RunConfig& cfg, LabeledDataset source,
                                   LabeledDataset target) {
  if (source.size() == 0 || target.size() == 0) {
    throw InvalidInput("experiment needs non-empty source and target sets");
  }
  ExperimentSetup setup;
  setup.source = std::move(source);
  setup.target = std::move(target);
  setup.source_model = train_model(cfg, setup.source, 1);
  setup.oracle = make_oracle(cfg.domain, cfg.shift, cfg.oracle_templates,
                             cfg.oracle_perturbation, cfg.oracle_logit_scale,
                             cfg.oracle_tau_c, cfg.seed);
  setup.lb = accuracy_of_model(setup.source_model, setup.target);
  const LinearSoftmaxModel ub_model = train_model(cfg, setup.target, 2);
  setup.ub = accuracy_of_model(ub_model, setup.target);
  return setup;
}

RunSummary run_variant(const ExperimentSetup& setup, const RunConfig& cfg,
                       Variant variant, const EpochObserver& observer) {
  RunSummary summary;
  summary.seed = cfg.seed;
  summary.variant = variant;
  summary.lb = setup.lb;
  summary.ub = setup.ub;

  if (variant == Variant::OracleOnly) {
    summary.method = accuracy_of_oracle(setup.oracle, setup.target);
  } else {
    // Student starts from the pretrained teacher weights.
    AdaptResult result =
        adapt(setup.source_model, setup.source_model, setup.oracle,
              setup.target, cfg.adaptation, variant, observer);
    summary.method = accuracy_of_model(result.student, setup.target);
    summary.gamma = result.gamma;
    summary.traces = std::move(result.traces);
  }
  summary.cg = closed_gap(summary.method, summary.lb, summary.ub);
  return summary;
}

nlohmann::json summary_to_json(const RunSummary& summary,
                               const RunConfig& cfg) {
  nlohmann::json j{{"lb", summary.lb},
                   {"method", summary.method},
                   {"ub", summary.ub},
                   {"seed", summary.seed},
                   {"variant", to_string(summary.variant)},
                   {"config", cfg.resolved_json()}};
  j["cg"] = summary.cg.has_value() ? nlohmann::json(*summary.cg)
                                   : nlohmann::json(nullptr);
  return j;
}

}  // namespace costar
