#pragma once

#include <string>
#include <vector>

#include "costar/prob.hpp"

namespace costar {

enum class FusionSource { Match, TeacherConf, OracleConf, Rejected };

std::string to_string(FusionSource s);
FusionSource fusion_source_from_string(const std::string& s);

// Outcome of the MatchOrConf rule: an accepted pseudo-label with its
// provenance, or Rejected (label -1). label == kRejected iff
// source == Rejected.
struct FusionDecision {
  int label = -1;
  FusionSource source = FusionSource::Rejected;
  double teacher_conf = 0.0;  // C_s = max(p_teach)
  double oracle_conf = 0.0;   // C_c = max(p_oracle)
};

struct FusionConfig {
  double psi_s = 0.1;
  double psi_c = 0.1;

  void validate() const;
};

// Six-case fusion of teacher and oracle predictions:
//   1. argmaxes match                        -> teacher label (Match)
//   2. disagree, C_s >= psi_s, C_c <  psi_c  -> teacher label
//   3. disagree, C_c >= psi_c, C_s <  psi_s  -> oracle label
//   4. disagree, both above, C_s >  C_c      -> teacher label
//   5. disagree, both above, C_c >= C_s      -> oracle label (ties to oracle)
//   6. otherwise                             -> Rejected
FusionDecision match_or_conf(const ProbDist& p_teach, const ProbDist& p_oracle,
                             const FusionConfig& cfg);

// gamma = max teacher confidence over samples where teacher and oracle
// argmaxes agree; 1.0 when no sample agrees (the high-confidence branch of
// weight adjustment then never fires).
double compute_gamma(const std::vector<ProbDist>& teacher_preds,
                     const std::vector<ProbDist>& oracle_preds);

}  // namespace costar
