#include "costar/pseudo.hpp"

#include <algorithm>

#include "costar/errors.hpp"
#include "costar/models.hpp"

namespace costar {

std::string to_string(FusionSource s) {
  switch (s) {
    case FusionSource::Match: return "match";
    case FusionSource::TeacherConf: return "teacher";
    case FusionSource::OracleConf: return "oracle";
    case FusionSource::Rejected: return "rejected";
  }
  return "rejected";
}

FusionSource fusion_source_from_string(const std::string& s) {
  if (s == "match") return FusionSource::Match;
  if (s == "teacher") return FusionSource::TeacherConf;
  if (s == "oracle") return FusionSource::OracleConf;
  if (s == "rejected") return FusionSource::Rejected;
  throw InvalidInput("unknown fusion source '" + s + "'");
}

void FusionConfig::validate() const {
  if (!(psi_s >= 0.0 && psi_s <= 1.0 && psi_c >= 0.0 && psi_c <= 1.0)) {
    throw InvalidConfig("fusion thresholds must lie in [0, 1]");
  }
}

FusionDecision match_or_conf(const ProbDist& p_teach, const ProbDist& p_oracle,
                             const FusionConfig& cfg) {
  if (p_teach.size() != p_oracle.size()) {
    throw ShapeMismatch("match_or_conf: distributions differ in length");
  }
  cfg.validate();

  const int teach_label = static_cast<int>(p_teach.argmax());
  const int oracle_label = static_cast<int>(p_oracle.argmax());
  const double cs = p_teach.max_value();
  const double cc = p_oracle.max_value();

  FusionDecision d;
  d.teacher_conf = cs;
  d.oracle_conf = cc;

  if (teach_label == oracle_label) {
    d.label = teach_label;
    d.source = FusionSource::Match;
    return d;
  }
  if (cs >= cfg.psi_s && cc < cfg.psi_c) {
    d.label = teach_label;
    d.source = FusionSource::TeacherConf;
    return d;
  }
  if (cc >= cfg.psi_c && cs < cfg.psi_s) {
    d.label = oracle_label;
    d.source = FusionSource::OracleConf;
    return d;
  }
  if (cs >= cfg.psi_s && cc >= cfg.psi_c) {
    if (cs > cc) {
      d.label = teach_label;
      d.source = FusionSource::TeacherConf;
    } else {
      d.label = oracle_label;
      d.source = FusionSource::OracleConf;
    }
    return d;
  }
  d.label = kRejected;
  d.source = FusionSource::Rejected;
  return d;
}

double compute_gamma(const std::vector<ProbDist>& teacher_preds,
                     const std::vector<ProbDist>& oracle_preds) {
  if (teacher_preds.empty() || teacher_preds.size() != oracle_preds.size()) {
    throw InvalidInput("compute_gamma: need equal-length, non-empty inputs");
  }
  double gamma = 0.0;
  bool any_agree = false;
  for (std::size_t i = 0; i < teacher_preds.size(); ++i) {
    if (teacher_preds[i].argmax() == oracle_preds[i].argmax()) {
      any_agree = true;
      gamma = std::max(gamma, teacher_preds[i].max_value());
    }
  }
  return any_agree ? gamma : 1.0;
}

}  // namespace costar
