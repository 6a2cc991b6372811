#include "costar/config.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"

namespace costar::config {

namespace {

// clang-format off
constexpr std::array kSchema = std::to_array<SchemaEntry>({
    {"seed",                     ValueType::Int,    "0",            "master seed; all randomness derives from it via named sub-streams"},
    {"kernel",                   ValueType::String, "auto",         "compute backend: auto | scalar | avx2"},

    {"data.classes",             ValueType::Int,    "4",            "number of classes K"},
    {"data.dim",                 ValueType::Int,    "2",            "feature dimension d"},
    {"data.samples_per_class",   ValueType::Int,    "250",          "samples per class per domain"},
    {"data.covariance_scale",    ValueType::Double, "1.0",          "isotropic variance of the source clusters"},
    {"data.mean_radius",         ValueType::Double, "3.0",          "class means on a circle of this radius in the first two dims"},
    {"data.class_means",         ValueType::String, "",             "explicit means 'x,y,..;x,y,..' overriding the circle layout"},

    {"shift.rotation",           ValueType::Double, "0.6283185307179586", "rotation of the first two dims, radians (default pi/5)"},
    {"shift.translation",        ValueType::String, "1.0,0.5",      "translation vector, comma separated, zero padded to d"},
    {"shift.noise_scale",        ValueType::Double, "1.5",          "target covariance multiplier"},

    {"oracle.m",                 ValueType::Int,    "4",            "template prototypes per class"},
    {"oracle.perturbation_scale",ValueType::Double, "0.35",         "gaussian perturbation of the template midpoints"},
    {"oracle.logit_scale",       ValueType::Double, "1.0",          "cosine similarity scale"},
    {"oracle.tau_c",             ValueType::Double, "0.5",          "oracle softmax temperature"},

    {"source.epochs",            ValueType::Int,    "100",          "supervised training epochs (source model and target bound)"},
    {"source.batch_size",        ValueType::Int,    "64",           "supervised training batch size"},
    {"source.lr",                ValueType::Double, "0.001",        "supervised training learning rate"},
    {"source.weight_decay",      ValueType::Double, "0.2",          "supervised training decoupled weight decay"},

    {"adapt.epochs",             ValueType::Int,    "30",           "adaptation epochs E"},
    {"adapt.batch_size",         ValueType::Int,    "32",           "adaptation batch size N"},
    {"adapt.tau",                ValueType::Double, "2.0",          "distillation temperature"},
    {"adapt.delta",              ValueType::Double, "0.999",        "teacher EMA decay"},
    {"adapt.ema_per",            ValueType::String, "step",         "EMA cadence: step | epoch"},
    {"adapt.gamma_mode",         ValueType::String, "once",         "confidence threshold schedule: once | per-epoch"},
    {"adapt.kl_tau_squared",     ValueType::Bool,   "false",        "multiply the KL term by tau^2"},
    {"adapt.lr",                 ValueType::Double, "0.001",        "student learning rate"},
    {"adapt.weight_decay",       ValueType::Double, "0.2",          "student decoupled weight decay"},
    {"adapt.beta1",              ValueType::Double, "0.9",          "optimizer first-moment coefficient"},
    {"adapt.beta2",              ValueType::Double, "0.999",        "optimizer second-moment coefficient"},
    {"adapt.eps",                ValueType::Double, "1e-8",         "optimizer numerical-stability epsilon"},

    {"fusion.psi_s",             ValueType::Double, "0.1",          "teacher confidence threshold"},
    {"fusion.psi_c",             ValueType::Double, "0.1",          "oracle confidence threshold"},

    {"curriculum.alpha",         ValueType::Double, "0.5",          "reliability sensitivity"},
    {"curriculum.beta",          ValueType::Double, "0.6",          "pace rate"},
    {"curriculum.pace",          ValueType::String, "exponential",  "pace function: reliability-only | exponential | linear | sigmoid | stepwise"},
    {"curriculum.exp_sign",      ValueType::String, "growth",       "exponential pace direction: growth | decay"},
    {"curriculum.n",             ValueType::Int,    "4",            "stepwise pace step count"},

    {"acr.enabled",              ValueType::Bool,   "true",         "enable probabilistic weight adjustment"},
    {"acr.eta",                  ValueType::Double, "6.0",          "inversion probability rate"},
    {"acr.rho",                  ValueType::Double, "0.25",         "per-batch selection cap fraction"},
    {"acr.sigma",                ValueType::Double, "0.05",         "stability threshold"},
    {"acr.lambda",               ValueType::Double, "0.2",          "inversion strength"},
    {"acr.h",                    ValueType::Int,    "10",           "history buffer length"},
    {"acr.min_history",          ValueType::Int,    "2",            "history entries required before the stability branch arms"},
});
// clang-format on

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

std::span<const SchemaEntry> schema() { return kSchema; }

const SchemaEntry* find_entry(const std::string& key) {
  for (const auto& e : kSchema) {
    if (key == e.key) return &e;
  }
  return nullptr;
}

ConfigMap defaults() {
  ConfigMap map;
  for (const auto& e : kSchema) map[e.key] = e.default_value;
  return map;
}

ConfigMap load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file: " + path.string());
  ConfigMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig(path.string() + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
    }
    set_value(map, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return map;
}

void set_value(ConfigMap& map, const std::string& key,
               const std::string& value) {
  if (find_entry(key) == nullptr) {
    throw InvalidConfig("unknown config key '" + key + "'");
  }
  map[key] = value;
}

void apply_override(ConfigMap& map, const std::string& key_eq_value) {
  const auto eq = key_eq_value.find('=');
  if (eq == std::string::npos) {
    throw InvalidConfig("--set expects key=value, got '" + key_eq_value + "'");
  }
  set_value(map, trim(key_eq_value.substr(0, eq)),
            trim(key_eq_value.substr(eq + 1)));
}

}  // namespace costar::config

namespace costar {

namespace {

using config::ConfigMap;
using config::ValueType;

class Resolver {
 public:
  explicit Resolver(ConfigMap map) : map_(std::move(map)) {}

  std::int64_t get_int(const std::string& key) const {
    const std::string& raw = at(key);
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(raw, &pos);
    } catch (const std::exception&) {
      throw InvalidConfig("config key '" + key + "': expected integer, got '" +
                          raw + "'");
    }
    if (pos != raw.size()) {
      throw InvalidConfig("config key '" + key + "': expected integer, got '" +
                          raw + "'");
    }
    return v;
  }

  double get_double(const std::string& key) const {
    const std::string& raw = at(key);
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(raw, &pos);
    } catch (const std::exception&) {
      throw InvalidConfig("config key '" + key + "': expected number, got '" +
                          raw + "'");
    }
    if (pos != raw.size() || !std::isfinite(v)) {
      throw InvalidConfig("config key '" + key + "': expected number, got '" +
                          raw + "'");
    }
    return v;
  }

  bool get_bool(const std::string& key) const {
    const std::string& raw = at(key);
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw InvalidConfig("config key '" + key + "': expected true/false, got '" +
                        raw + "'");
  }

  const std::string& get_string(const std::string& key) const { return at(key); }

  const ConfigMap& map() const { return map_; }

 private:
  const std::string& at(const std::string& key) const {
    const auto it = map_.find(key);
    if (it == map_.end()) {
      throw InvalidConfig("config key '" + key + "' missing from schema map");
    }
    return it->second;
  }

  ConfigMap map_;
};

std::vector<double> parse_vector(const std::string& raw,
                                 const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InvalidConfig("config key '" + key + "': bad number '" + cell + "'");
    }
  }
  return out;
}

std::vector<std::vector<double>> parse_means(const std::string& raw, int k,
                                             int d) {
  std::vector<std::vector<double>> means;
  std::stringstream ss(raw);
  std::string group;
  while (std::getline(ss, group, ';')) {
    means.push_back(parse_vector(group, "data.class_means"));
  }
  if (means.size() != static_cast<std::size_t>(k)) {
    throw InvalidConfig("data.class_means: expected " + std::to_string(k) +
                        " mean vectors");
  }
  for (auto& m : means) {
    if (m.size() != static_cast<std::size_t>(d)) {
      throw InvalidConfig("data.class_means: each mean needs " +
                          std::to_string(d) + " values");
    }
  }
  return means;
}

std::vector<std::vector<double>> circle_means(int k, int d, double radius) {
  std::vector<std::vector<double>> means(k, std::vector<double>(d, 0.0));
  for (int c = 0; c < k; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / k;
    means[c][0] = radius * std::cos(angle);
    means[c][1] = radius * std::sin(angle);
  }
  return means;
}

}  // namespace

RunConfig resolve_config(const ConfigMap& file_values,
                         const ConfigMap& overrides) {
  ConfigMap merged = config::defaults();
  for (const auto& [k, v] : file_values) config::set_value(merged, k, v);
  for (const auto& [k, v] : overrides) config::set_value(merged, k, v);

  Resolver r(std::move(merged));
  RunConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(r.get_int("seed"));
  cfg.kernel = r.get_string("kernel");
  kernels::kind_from_name(cfg.kernel);  // validates

  cfg.domain.num_classes = static_cast<int>(r.get_int("data.classes"));
  cfg.domain.feature_dim = static_cast<int>(r.get_int("data.dim"));
  cfg.domain.samples_per_class =
      static_cast<int>(r.get_int("data.samples_per_class"));
  cfg.domain.covariance_scale = r.get_double("data.covariance_scale");
  const std::string means_raw = r.get_string("data.class_means");
  cfg.domain.class_means =
      means_raw.empty()
          ? circle_means(cfg.domain.num_classes, cfg.domain.feature_dim,
                         r.get_double("data.mean_radius"))
          : parse_means(means_raw, cfg.domain.num_classes,
                        cfg.domain.feature_dim);

  cfg.shift.rotation_angle = r.get_double("shift.rotation");
  cfg.shift.translation =
      parse_vector(r.get_string("shift.translation"), "shift.translation");
  if (cfg.shift.translation.size() >
      static_cast<std::size_t>(cfg.domain.feature_dim)) {
    throw InvalidConfig("shift.translation has more entries than data.dim");
  }
  cfg.shift.translation.resize(cfg.domain.feature_dim, 0.0);
  cfg.shift.noise_scale_multiplier = r.get_double("shift.noise_scale");

  cfg.oracle_templates = static_cast<int>(r.get_int("oracle.m"));
  cfg.oracle_perturbation = r.get_double("oracle.perturbation_scale");
  cfg.oracle_logit_scale = r.get_double("oracle.logit_scale");
  cfg.oracle_tau_c = r.get_double("oracle.tau_c");

  cfg.source.epochs = static_cast<int>(r.get_int("source.epochs"));
  cfg.source.batch_size = static_cast<int>(r.get_int("source.batch_size"));
  cfg.source.optimizer.lr = r.get_double("source.lr");
  cfg.source.optimizer.weight_decay = r.get_double("source.weight_decay");

  AdaptationConfig& a = cfg.adaptation;
  a.epochs = static_cast<int>(r.get_int("adapt.epochs"));
  a.batch_size = static_cast<int>(r.get_int("adapt.batch_size"));
  a.tau = r.get_double("adapt.tau");
  a.delta = r.get_double("adapt.delta");
  const std::string ema_per = r.get_string("adapt.ema_per");
  if (ema_per == "step") {
    a.ema_cadence = EmaCadence::Step;
  } else if (ema_per == "epoch") {
    a.ema_cadence = EmaCadence::Epoch;
  } else {
    throw InvalidConfig("adapt.ema_per must be 'step' or 'epoch'");
  }
  const std::string gamma_mode = r.get_string("adapt.gamma_mode");
  if (gamma_mode == "once") {
    a.gamma_mode = GammaMode::Once;
  } else if (gamma_mode == "per-epoch") {
    a.gamma_mode = GammaMode::PerEpoch;
  } else {
    throw InvalidConfig("adapt.gamma_mode must be 'once' or 'per-epoch'");
  }
  a.kl_tau_squared = r.get_bool("adapt.kl_tau_squared");
  a.optimizer.lr = r.get_double("adapt.lr");
  a.optimizer.weight_decay = r.get_double("adapt.weight_decay");
  a.optimizer.beta1 = r.get_double("adapt.beta1");
  a.optimizer.beta2 = r.get_double("adapt.beta2");
  a.optimizer.eps = r.get_double("adapt.eps");
  a.fusion.psi_s = r.get_double("fusion.psi_s");
  a.fusion.psi_c = r.get_double("fusion.psi_c");
  a.curriculum.alpha = r.get_double("curriculum.alpha");
  a.curriculum.pace.beta = r.get_double("curriculum.beta");
  a.curriculum.pace.function = pace_from_string(r.get_string("curriculum.pace"));
  const std::string sign = r.get_string("curriculum.exp_sign");
  if (sign == "growth") {
    a.curriculum.pace.sign = ExpSign::Growth;
  } else if (sign == "decay") {
    a.curriculum.pace.sign = ExpSign::Decay;
  } else {
    throw InvalidConfig("curriculum.exp_sign must be 'growth' or 'decay'");
  }
  a.curriculum.pace.steps = static_cast<int>(r.get_int("curriculum.n"));
  a.acr_enabled = r.get_bool("acr.enabled");
  a.acr.eta = r.get_double("acr.eta");
  a.acr.rho = r.get_double("acr.rho");
  a.acr.sigma = r.get_double("acr.sigma");
  a.acr.lambda = r.get_double("acr.lambda");
  a.acr.history = static_cast<int>(r.get_int("acr.h"));
  a.acr.min_history = static_cast<int>(r.get_int("acr.min_history"));
  a.seed = cfg.seed;

  // Range checks live with the owning modules.
  cfg.domain.validate();
  cfg.shift.validate();
  a.validate();
  if (cfg.oracle_templates < 1) throw InvalidConfig("oracle.m must be >= 1");
  if (!(cfg.oracle_logit_scale > 0.0)) {
    throw InvalidConfig("oracle.logit_scale must be > 0");
  }
  if (!(cfg.oracle_tau_c > 0.0)) throw InvalidConfig("oracle.tau_c must be > 0");
  if (cfg.oracle_perturbation < 0.0) {
    throw InvalidConfig("oracle.perturbation_scale must be >= 0");
  }
  if (cfg.source.epochs < 0) throw InvalidConfig("source.epochs must be >= 0");
  if (cfg.source.batch_size < 1) {
    throw InvalidConfig("source.batch_size must be >= 1");
  }

  cfg.resolved = r.map();
  return cfg;
}

nlohmann::json RunConfig::resolved_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, raw] : resolved) {
    const auto* entry = config::find_entry(key);
    switch (entry->type) {
      case ValueType::Int:
        out[key] = std::stoll(raw);
        break;
      case ValueType::Double:
        out[key] = std::stod(raw);
        break;
      case ValueType::Bool:
        out[key] = (raw == "true" || raw == "1");
        break;
      case ValueType::String:
        out[key] = raw;
        break;
    }
  }
  return out;
}

}  // namespace costar
