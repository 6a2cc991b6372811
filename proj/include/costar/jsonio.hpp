#pragma once

#include <filesystem>
#include <vector>

#include "costar/models.hpp"
#include "costar/oracle.hpp"
#include "costar/trainer.hpp"

#include "json.hpp"

namespace costar {

// Model checkpoint: {"k":K, "d":d, "w":[[...]], "b":[...]}.
nlohmann::json model_to_json(const LinearSoftmaxModel& model);
LinearSoftmaxModel model_from_json(const nlohmann::json& j);
void save_model(const LinearSoftmaxModel& model,
                const std::filesystem::path& path);
LinearSoftmaxModel load_model(const std::filesystem::path& path);

// Oracle checkpoint: model fields plus templates and scales.
nlohmann::json oracle_to_json(const TemplateOracle& oracle);
TemplateOracle oracle_from_json(const nlohmann::json& j);
void save_oracle(const TemplateOracle& oracle,
                 const std::filesystem::path& path);
TemplateOracle load_oracle(const std::filesystem::path& path);

nlohmann::json trace_to_json(const EpochTrace& trace);
void write_metrics_jsonl(const std::vector<EpochTrace>& traces,
                         const std::filesystem::path& path);

// Prediction files for `fuse`: one {"id":..., "p":[...]} object per line.
struct Prediction {
  std::int64_t id = 0;
  ProbDist p;
};
std::vector<Prediction> read_predictions_jsonl(
    const std::filesystem::path& path);

}  // namespace costar
