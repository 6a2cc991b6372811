#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "costar/acr.hpp"
#include "costar/curriculum.hpp"
#include "costar/datagen.hpp"
#include "costar/models.hpp"
#include "costar/oracle.hpp"
#include "costar/pseudo.hpp"

namespace costar {

// Ablation variants. OracleOnly never trains and is resolved by the
// experiment layer; adapt() handles the other four.
enum class Variant { TeacherOnly, OracleOnly, Fusion, FusionCurriculum, Full };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);  // CLI names

enum class EmaCadence { Step, Epoch };
enum class GammaMode { Once, PerEpoch };

struct AdaptationConfig {
  int epochs = 30;      // E
  int batch_size = 32;  // N
  double tau = 2.0;     // distillation temperature
  double delta = 0.999; // EMA decay
  EmaCadence ema_cadence = EmaCadence::Step;
  GammaMode gamma_mode = GammaMode::Once;
  bool kl_tau_squared = false;
  OptimizerConfig optimizer;
  CurriculumConfig curriculum;
  AcrConfig acr;
  bool acr_enabled = true;
  FusionConfig fusion;
  std::uint64_t seed = 0;

  void validate() const;
};

// Per-target-sample record. The oracle prediction is computed exactly once
// per run; history holds the student's recent untempered predictions.
struct SampleState {
  int id = 0;
  ProbDist oracle_pred;
  HistoryBuffer history;
  double last_weight = 0.0;
  double last_reliability = 0.0;
  FusionDecision last_decision;
};

struct EpochTrace {
  int epoch = 0;
  double mean_max_confidence = 0.0;   // epoch mean of max(p_student)
  double min_batch_weight_mean = 0.0; // epoch mean of per-batch min weight
  double target_accuracy = 0.0;       // percent; labels used here only
  double rejected_fraction = 0.0;
  double inverted_fraction = 0.0;
  double mean_reliability = 0.0;
};

struct AdaptResult {
  LinearSoftmaxModel student;
  LinearSoftmaxModel teacher;
  std::vector<EpochTrace> traces;
  double gamma = 1.0;
};

// Test/inspection hook, called after every epoch.
using EpochObserver =
    std::function<void(int epoch, std::span<const SampleState>)>;

// e / E.
double epoch_fraction(int epoch, int total_epochs);

// Full adaptation loop: per batch, fuse pseudo-labels from the live teacher
// and the cached oracle predictions, weight samples by reliability and
// pace, optionally apply the probabilistic weight adjustment, take one
// optimizer step on the weighted loss, EMA the teacher, and record the
// student's untempered predictions in each sample's history.
AdaptResult adapt(const LinearSoftmaxModel& student_init,
                  const LinearSoftmaxModel& teacher_init,
                  const TemplateOracle& oracle, const LabeledDataset& target,
                  const AdaptationConfig& cfg, Variant variant = Variant::Full,
                  const EpochObserver& observer = {});

}  // namespace costar
