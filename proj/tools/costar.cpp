// Experiment runner: config-driven synthetic domain-shift benchmarks for
// the collaborative self-training adaptation pipeline.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "costar/config.hpp"
#include "costar/datagen.hpp"
#include "costar/errors.hpp"
#include "costar/experiment.hpp"
#include "costar/jsonio.hpp"
#include "costar/kernels.hpp"
#include "costar/pseudo.hpp"

namespace fs = std::filesystem;
using costar::config::ConfigMap;

namespace {

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::int64_t> seed;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", opts.overrides, "override a config key (key=value)");
  cmd->add_option("--seed", opts.seed, "override the config seed");
}

costar::RunConfig resolve(const CommonOpts& opts) {
  ConfigMap file_values;
  if (!opts.config_path.empty()) {
    file_values = costar::config::load_file(opts.config_path);
  }
  ConfigMap overrides;
  for (const auto& kv : opts.overrides) {
    costar::config::apply_override(overrides, kv);
  }
  if (opts.seed.has_value()) {
    costar::config::set_value(overrides, "seed", std::to_string(*opts.seed));
  }
  costar::RunConfig cfg = costar::resolve_config(file_values, overrides);
  costar::kernels::select(costar::kernels::kind_from_name(cfg.kernel));
  return cfg;
}

void require_writable(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    throw costar::InvalidConfig("refusing to overwrite " + path.string() +
                                " (use --force)");
  }
}

std::pair<costar::LabeledDataset, costar::LabeledDataset> datasets_for(
    const costar::RunConfig& cfg, const std::string& data_dir) {
  if (data_dir.empty()) {
    return costar::make_domain_pair(cfg.domain, cfg.shift, cfg.seed);
  }
  const fs::path dir(data_dir);
  return {costar::read_csv(dir / "source.csv"),
          costar::read_csv(dir / "target.csv")};
}

void write_summary(const nlohmann::json& summary, const std::string& path) {
  if (path.empty()) {
    std::cout << summary.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw costar::Error("cannot open for writing: " + path);
  out << summary.dump(2) << '\n';
}

int run_gen_data(const CommonOpts& common, const std::string& out_dir,
                 bool force) {
  const costar::RunConfig cfg = resolve(common);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const fs::path source_path = dir / "source.csv";
  const fs::path target_path = dir / "target.csv";
  require_writable(source_path, force);
  require_writable(target_path, force);

  auto [source, target] = costar::make_domain_pair(cfg.domain, cfg.shift, cfg.seed);
  costar::write_csv(source, source_path);
  costar::write_csv(target, target_path);
  std::cout << "wrote " << source.size() << " source rows to " << source_path
            << '\n'
            << "wrote " << target.size() << " target rows to " << target_path
            << '\n';
  return 0;
}

int run_train_source(const CommonOpts& common, const std::string& data_dir,
                     const std::string& out_path, bool force) {
  const costar::RunConfig cfg = resolve(common);
  require_writable(out_path, force);
  auto [source, target] = datasets_for(cfg, data_dir);
  const costar::ExperimentSetup setup =
      costar::prepare_experiment(cfg, std::move(source), std::move(target));
  costar::save_model(setup.source_model, out_path);
  std::cout << "source accuracy: "
            << costar::accuracy_of_model(setup.source_model, setup.source)
            << "%\n"
            << "target accuracy (lower bound): " << setup.lb << "%\n"
            << "saved checkpoint to " << out_path << '\n';
  return 0;
}

int run_zero_shot_eval(const CommonOpts& common, const std::string& data_dir,
                       const std::string& oracle_path,
                       const std::string& oracle_out,
                       const std::string& out_path) {
  const costar::RunConfig cfg = resolve(common);
  auto [source, target] = datasets_for(cfg, data_dir);
  const costar::TemplateOracle oracle =
      oracle_path.empty()
          ? costar::make_oracle(cfg.domain, cfg.shift, cfg.oracle_templates,
                                cfg.oracle_perturbation, cfg.oracle_logit_scale,
                                cfg.oracle_tau_c, cfg.seed)
          : costar::load_oracle(oracle_path);
  const double acc = costar::accuracy_of_oracle(oracle, target);
  std::cout << "zero-shot target accuracy: " << acc << "%\n";
  if (!oracle_out.empty()) {
    costar::save_oracle(oracle, oracle_out);
    std::cout << "saved oracle checkpoint to " << oracle_out << '\n';
  }
  if (!out_path.empty()) {
    write_summary(nlohmann::json{{"oracle_accuracy", acc},
                                 {"seed", cfg.seed},
                                 {"config", cfg.resolved_json()}},
                  out_path);
  }
  return 0;
}

int run_fuse(const CommonOpts& common, const std::string& teacher_path,
             const std::string& oracle_path, const std::string& out_path) {
  const costar::RunConfig cfg = resolve(common);
  const auto teacher_preds = costar::read_predictions_jsonl(teacher_path);
  const auto oracle_preds = costar::read_predictions_jsonl(oracle_path);

  std::map<std::int64_t, const costar::ProbDist*> oracle_by_id;
  for (const auto& pred : oracle_preds) oracle_by_id[pred.id] = &pred.p;

  std::ofstream out(out_path);
  if (!out) throw costar::Error("cannot open for writing: " + out_path);
  for (const auto& pred : teacher_preds) {
    const auto it = oracle_by_id.find(pred.id);
    if (it == oracle_by_id.end()) {
      throw costar::InvalidInput("fuse: id " + std::to_string(pred.id) +
                                 " missing from " + oracle_path);
    }
    const costar::FusionDecision d =
        costar::match_or_conf(pred.p, *it->second, cfg.adaptation.fusion);
    out << nlohmann::json{{"id", pred.id},
                          {"label", d.label},
                          {"source", costar::to_string(d.source)},
                          {"cs", d.teacher_conf},
                          {"cc", d.oracle_conf}}
               .dump()
        << '\n';
  }
  std::cout << "wrote " << teacher_preds.size() << " decisions to " << out_path
            << '\n';
  return 0;
}

int run_adapt(const CommonOpts& common, const std::string& variant_name,
              const std::string& data_dir, const std::string& teacher_path,
              const std::string& oracle_path, const std::string& metrics_path,
              std::string summary_path) {
  const costar::RunConfig cfg = resolve(common);
  const costar::Variant variant = costar::variant_from_string(variant_name);

  auto [source, target] = datasets_for(cfg, data_dir);
  costar::ExperimentSetup setup =
      costar::prepare_experiment(cfg, std::move(source), std::move(target));
  if (!teacher_path.empty()) {
    setup.source_model = costar::load_model(teacher_path);
    setup.lb = costar::accuracy_of_model(setup.source_model, setup.target);
  }
  if (!oracle_path.empty()) {
    setup.oracle = costar::load_oracle(oracle_path);
  }

  const costar::RunSummary summary = costar::run_variant(setup, cfg, variant);
  if (!metrics_path.empty()) {
    costar::write_metrics_jsonl(summary.traces, metrics_path);
    if (summary_path.empty()) {
      summary_path = fs::path(metrics_path)
                         .replace_extension(".summary.json")
                         .string();
    }
  }
  write_summary(costar::summary_to_json(summary, cfg), summary_path);
  return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto range = spec.find("..");
  if (range != std::string::npos) {
    const std::uint64_t lo = std::stoull(spec.substr(0, range));
    const std::uint64_t hi = std::stoull(spec.substr(range + 2));
    if (hi < lo) throw costar::InvalidConfig("--seeds range is empty");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) seeds.push_back(std::stoull(cell));
  if (seeds.empty()) throw costar::InvalidConfig("--seeds is empty");
  return seeds;
}

int run_sweep(const CommonOpts& common, const std::string& param,
              const std::string& values_csv, const std::string& seeds_spec,
              const std::string& variant_name, const std::string& out_path) {
  if (costar::config::find_entry(param) == nullptr) {
    throw costar::InvalidConfig("unknown sweep parameter '" + param + "'");
  }
  const costar::Variant variant = costar::variant_from_string(variant_name);
  const std::vector<std::uint64_t> seeds = parse_seeds(seeds_spec);

  std::vector<std::string> values;
  {
    std::stringstream ss(values_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(cell);
  }
  if (values.empty()) throw costar::InvalidConfig("--values is empty");

  ConfigMap file_values;
  if (!common.config_path.empty()) {
    file_values = costar::config::load_file(common.config_path);
  }
  ConfigMap base_overrides;
  for (const auto& kv : common.overrides) {
    costar::config::apply_override(base_overrides, kv);
  }

  std::ostringstream csv;
  csv << "param,value,mean_accuracy,std_accuracy\n";
  for (const auto& value : values) {
    std::vector<double> accs;
    for (const std::uint64_t seed : seeds) {
      ConfigMap overrides = base_overrides;
      costar::config::set_value(overrides, param, value);
      costar::config::set_value(overrides, "seed", std::to_string(seed));
      const costar::RunConfig cfg =
          costar::resolve_config(file_values, overrides);
      costar::kernels::select(costar::kernels::kind_from_name(cfg.kernel));
      const costar::ExperimentSetup setup = costar::prepare_experiment(cfg);
      accs.push_back(costar::run_variant(setup, cfg, variant).method);
    }
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const double stddev =
        accs.size() > 1 ? std::sqrt(var / static_cast<double>(accs.size() - 1))
                        : 0.0;
    char line[160];
    std::snprintf(line, sizeof line, "%s,%s,%.4f,%.4f\n", param.c_str(),
                  value.c_str(), mean, stddev);
    csv << line;
  }

  if (out_path.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw costar::Error("cannot open for writing: " + out_path);
    out << csv.str();
    std::cout << "wrote sweep results to " << out_path << '\n';
  }
  return 0;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"synthetic domain-shift adaptation experiments"};
  app.require_subcommand(1);

  CommonOpts gen_common;
  std::string gen_out;
  bool gen_force = false;
  auto* gen = app.add_subcommand("gen-data",
                                 "generate a source/target dataset pair");
  add_common(gen, gen_common);
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--force", gen_force, "overwrite existing files");

  CommonOpts train_common;
  std::string train_data, train_out;
  bool train_force = false;
  auto* train = app.add_subcommand(
      "train-source", "train the source model and save a checkpoint");
  add_common(train, train_common);
  train->add_option("--data", train_data,
                    "directory with source.csv/target.csv (default: generate)");
  train->add_option("--out", train_out, "checkpoint path")->required();
  train->add_flag("--force", train_force, "overwrite an existing checkpoint");

  CommonOpts zs_common;
  std::string zs_data, zs_oracle, zs_oracle_out, zs_out;
  auto* zs = app.add_subcommand("zero-shot-eval",
                                "evaluate the frozen oracle on the target set");
  add_common(zs, zs_common);
  zs->add_option("--data", zs_data, "directory with source.csv/target.csv");
  zs->add_option("--oracle", zs_oracle, "oracle checkpoint to load")
      ->check(CLI::ExistingFile);
  zs->add_option("--oracle-out", zs_oracle_out, "save the oracle checkpoint");
  zs->add_option("--out", zs_out, "write a summary json here");

  CommonOpts fuse_common;
  std::string fuse_teacher, fuse_oracle, fuse_out;
  auto* fuse = app.add_subcommand(
      "fuse", "fuse two prediction files into pseudo-label decisions");
  add_common(fuse, fuse_common);
  fuse->add_option("--teacher", fuse_teacher, "teacher predictions jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  fuse->add_option("--oracle", fuse_oracle, "oracle predictions jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  fuse->add_option("--out", fuse_out, "decision jsonl path")->required();

  CommonOpts adapt_common;
  std::string adapt_variant = "full";
  std::string adapt_data, adapt_teacher, adapt_oracle, adapt_metrics,
      adapt_summary;
  auto* adapt_cmd =
      app.add_subcommand("adapt", "run the adaptation loop end to end");
  add_common(adapt_cmd, adapt_common);
  adapt_cmd->add_option(
      "--variant", adapt_variant,
      "full | no-acr | no-curriculum | teacher-only | oracle-only");
  adapt_cmd->add_option("--data", adapt_data,
                        "directory with source.csv/target.csv");
  adapt_cmd->add_option("--teacher", adapt_teacher,
                        "teacher checkpoint (skip source training)")
      ->check(CLI::ExistingFile);
  adapt_cmd->add_option("--oracle", adapt_oracle, "oracle checkpoint")
      ->check(CLI::ExistingFile);
  adapt_cmd->add_option("--metrics", adapt_metrics, "epoch metrics jsonl path");
  adapt_cmd->add_option("--summary", adapt_summary,
                        "summary json path (default: stdout or next to metrics)");

  CommonOpts sweep_common;
  std::string sweep_param, sweep_values, sweep_seeds = "0",
                           sweep_variant = "full", sweep_out;
  auto* sweep = app.add_subcommand(
      "sweep", "grid of runs over one parameter, aggregated to csv");
  add_common(sweep, sweep_common);
  sweep->add_option("--param", sweep_param, "config key to sweep")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")
      ->required();
  sweep->add_option("--seeds", sweep_seeds, "seed list '0,1,2' or range '0..9'");
  sweep->add_option("--variant", sweep_variant, "variant to run");
  sweep->add_option("--out", sweep_out, "csv path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return run_gen_data(gen_common, gen_out, gen_force);
    if (train->parsed()) {
      return run_train_source(train_common, train_data, train_out, train_force);
    }
    if (zs->parsed()) {
      return run_zero_shot_eval(zs_common, zs_data, zs_oracle, zs_oracle_out,
                                zs_out);
    }
    if (fuse->parsed()) {
      return run_fuse(fuse_common, fuse_teacher, fuse_oracle, fuse_out);
    }
    if (adapt_cmd->parsed()) {
      return run_adapt(adapt_common, adapt_variant, adapt_data, adapt_teacher,
                       adapt_oracle, adapt_metrics, adapt_summary);
    }
    if (sweep->parsed()) {
      return run_sweep(sweep_common, sweep_param, sweep_values, sweep_seeds,
                       sweep_variant, sweep_out);
    }
  } catch (const costar::InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int main(int argc, char** argv) {
  try {
    return run_main(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (...) {
    std::cerr << "error: unknown failure\n";
    return 1;
  }
}
