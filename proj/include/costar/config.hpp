#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "costar/datagen.hpp"
#include "costar/models.hpp"
#include "costar/trainer.hpp"

#include "json.hpp"

namespace costar::config {

enum class ValueType { Int, Double, Bool, String };

struct SchemaEntry {
  const char* key;
  ValueType type;
  const char* default_value;
  const char* description;
};

// The documented schema: every recognized dotted key with its type and
// default. Unknown keys are errors everywhere (file, --set, sweep --param).
std::span<const SchemaEntry> schema();
const SchemaEntry* find_entry(const std::string& key);

using ConfigMap = std::map<std::string, std::string>;

ConfigMap defaults();

// "key = value" lines; '#' starts a comment; blank lines ignored.
ConfigMap load_file(const std::filesystem::path& path);

// "key=value" as passed to --set; validates the key against the schema.
void apply_override(ConfigMap& map, const std::string& key_eq_value);
void set_value(ConfigMap& map, const std::string& key, const std::string& value);

}  // namespace costar::config

namespace costar {

// Fully resolved run configuration: defaults materialized, every value
// parsed and range-checked. `resolved` preserves the flat dotted-key map
// for embedding into summaries (exact replay).
struct RunConfig {
  std::uint64_t seed = 0;
  std::string kernel = "auto";

  DomainSpec domain;
  ShiftSpec shift;

  int oracle_templates = 4;
  double oracle_perturbation = 0.35;
  double oracle_logit_scale = 1.0;
  double oracle_tau_c = 0.5;

  SourceTrainConfig source;
  AdaptationConfig adaptation;

  config::ConfigMap resolved;

  // json object with native types, key per schema entry.
  nlohmann::json resolved_json() const;
};

// defaults <- file (optional) <- overrides; throws InvalidConfig on unknown
// keys, parse failures, or range violations.
RunConfig resolve_config(const config::ConfigMap& file_values,
                         const config::ConfigMap& overrides);

}  // namespace costar
