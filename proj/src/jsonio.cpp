#include "costar/jsonio.hpp"

#include <fstream>

#include "costar/errors.hpp"

namespace costar {

namespace {

nlohmann::json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("bad json in " + path.string() + ": " + e.what());
  }
  return j;
}

void write_file(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

nlohmann::json model_to_json(const LinearSoftmaxModel& model) {
  nlohmann::json rows = nlohmann::json::array();
  for (int k = 0; k < model.num_classes; ++k) {
    const auto row = model.row(k);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"k", model.num_classes},
          {"d", model.dim},
          {"w", std::move(rows)},
          {"b", model.b}};
}

LinearSoftmaxModel model_from_json(const nlohmann::json& j) {
  try {
    LinearSoftmaxModel m =
        LinearSoftmaxModel::zeros(j.at("k").get<int>(), j.at("d").get<int>());
    const auto& rows = j.at("w");
    if (rows.size() != static_cast<std::size_t>(m.num_classes)) {
      throw InvalidInput("model checkpoint: wrong row count");
    }
    for (int k = 0; k < m.num_classes; ++k) {
      const auto row = rows.at(k).get<std::vector<double>>();
      if (row.size() != static_cast<std::size_t>(m.dim)) {
        throw InvalidInput("model checkpoint: wrong row length");
      }
      std::copy(row.begin(), row.end(),
                m.w.begin() + static_cast<std::size_t>(k) * m.dim);
    }
    m.b = j.at("b").get<std::vector<double>>();
    if (m.b.size() != static_cast<std::size_t>(m.num_classes)) {
      throw InvalidInput("model checkpoint: wrong bias length");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad model checkpoint: ") + e.what());
  }
}

void save_model(const LinearSoftmaxModel& model,
                const std::filesystem::path& path) {
  write_file(model_to_json(model), path);
}

LinearSoftmaxModel load_model(const std::filesystem::path& path) {
  return model_from_json(parse_file(path));
}

nlohmann::json oracle_to_json(const TemplateOracle& oracle) {
  nlohmann::json classes = nlohmann::json::array();
  for (int c = 0; c < oracle.num_classes; ++c) {
    nlohmann::json tpls = nlohmann::json::array();
    for (int t = 0; t < oracle.templates_per_class; ++t) {
      const auto tpl = oracle.template_at(c, t);
      tpls.push_back(std::vector<double>(tpl.begin(), tpl.end()));
    }
    classes.push_back(std::move(tpls));
  }
  return {{"k", oracle.num_classes},
          {"d", oracle.dim},
          {"m", oracle.templates_per_class},
          {"logit_scale", oracle.logit_scale},
          {"tau_c", oracle.temperature},
          {"templates", std::move(classes)}};
}

TemplateOracle oracle_from_json(const nlohmann::json& j) {
  try {
    TemplateOracle o;
    o.num_classes = j.at("k").get<int>();
    o.dim = j.at("d").get<int>();
    o.templates_per_class = j.at("m").get<int>();
    o.logit_scale = j.at("logit_scale").get<double>();
    o.temperature = j.at("tau_c").get<double>();
    for (const auto& cls : j.at("templates")) {
      for (const auto& tpl : cls) {
        const auto v = tpl.get<std::vector<double>>();
        o.templates.insert(o.templates.end(), v.begin(), v.end());
      }
    }
    o.validate();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad oracle checkpoint: ") + e.what());
  }
}

void save_oracle(const TemplateOracle& oracle,
                 const std::filesystem::path& path) {
  write_file(oracle_to_json(oracle), path);
}

TemplateOracle load_oracle(const std::filesystem::path& path) {
  return oracle_from_json(parse_file(path));
}

nlohmann::json trace_to_json(const EpochTrace& trace) {
  return {{"epoch", trace.epoch},
          {"mean_max_confidence", trace.mean_max_confidence},
          {"min_batch_weight_mean", trace.min_batch_weight_mean},
          {"target_accuracy", trace.target_accuracy},
          {"rejected_fraction", trace.rejected_fraction},
          {"inverted_fraction", trace.inverted_fraction},
          {"mean_reliability", trace.mean_reliability}};
}

void write_metrics_jsonl(const std::vector<EpochTrace>& traces,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path.string());
  for (const auto& t : traces) {
    out << trace_to_json(t).dump() << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<Prediction> read_predictions_jsonl(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path.string());
  std::vector<Prediction> preds;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      Prediction pred;
      pred.id = j.at("id").get<std::int64_t>();
      pred.p = ProbDist::checked(j.at("p").get<std::vector<double>>());
      preds.push_back(std::move(pred));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) +
                         ": bad prediction line: " + e.what());
    }
  }
  return preds;
}

}  // namespace costar
