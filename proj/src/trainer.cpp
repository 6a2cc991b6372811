#include "costar/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "costar/errors.hpp"
#include "costar/eval.hpp"
#include "costar/kernels.hpp"
#include "costar/rng.hpp"

namespace costar {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::TeacherOnly: return "teacher-only";
    case Variant::OracleOnly: return "oracle-only";
    case Variant::Fusion: return "no-curriculum";
    case Variant::FusionCurriculum: return "no-acr";
    case Variant::Full: return "full";
  }
  return "full";
}

Variant variant_from_string(const std::string& s) {
  if (s == "teacher-only") return Variant::TeacherOnly;
  if (s == "oracle-only") return Variant::OracleOnly;
  if (s == "no-curriculum") return Variant::Fusion;
  if (s == "no-acr") return Variant::FusionCurriculum;
  if (s == "full") return Variant::Full;
  throw InvalidConfig(
      "variant must be one of: full, no-acr, no-curriculum, teacher-only, "
      "oracle-only (got '" + s + "')");
}

void AdaptationConfig::validate() const {
  if (epochs < 1) throw InvalidConfig("adapt epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("adapt batch_size must be >= 1");
  if (!(tau > 0.0)) throw InvalidConfig("adapt tau must be > 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidConfig("adapt delta must lie in [0, 1]");
  }
  curriculum.validate();
  acr.validate();
  fusion.validate();
}

double epoch_fraction(int epoch, int total_epochs) {
  if (total_epochs < 1 || epoch < 0 || epoch >= total_epochs) {
    throw InvalidInput("epoch_fraction: need 0 <= epoch < total_epochs");
  }
  return static_cast<double>(epoch) / static_cast<double>(total_epochs);
}

namespace {

double compute_gamma_for(const LinearSoftmaxModel& teacher,
                         const LabeledDataset& target,
                         const std::vector<SampleState>& states) {
  std::vector<ProbDist> teacher_preds;
  std::vector<ProbDist> oracle_preds;
  teacher_preds.reserve(target.size());
  oracle_preds.reserve(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    teacher_preds.push_back(teacher.forward(target.row(i), 1.0));
    oracle_preds.push_back(states[i].oracle_pred);
  }
  return compute_gamma(teacher_preds, oracle_preds);
}

}  // namespace

AdaptResult adapt(const LinearSoftmaxModel& student_init,
                  const LinearSoftmaxModel& teacher_init,
                  const TemplateOracle& oracle, const LabeledDataset& target,
                  const AdaptationConfig& cfg, Variant variant,
                  const EpochObserver& observer) {
  cfg.validate();
  if (variant == Variant::OracleOnly) {
    throw InvalidConfig("oracle-only variant does not run the training loop");
  }
  if (target.size() == 0) throw InvalidInput("adapt: target set is empty");
  if (student_init.dim != target.dim || teacher_init.dim != target.dim ||
      oracle.dim != target.dim) {
    throw ShapeMismatch("adapt: model/oracle/data dimensions differ");
  }
  if (student_init.num_classes != teacher_init.num_classes ||
      student_init.num_classes != oracle.num_classes) {
    throw ShapeMismatch("adapt: class counts differ");
  }

  const auto& kern = kernels::active();
  const std::size_t n = target.size();
  const int k = student_init.num_classes;
  const bool acr_active = variant == Variant::Full && cfg.acr_enabled;
  const bool use_fusion = variant != Variant::TeacherOnly;
  const bool use_pace = variant == Variant::FusionCurriculum ||
                        variant == Variant::Full;

  AdaptResult result;
  result.student = student_init;
  result.teacher = teacher_init;
  AdamW opt(k, target.dim, cfg.optimizer);

  // Oracle predictions are computed once, before the loop.
  std::vector<SampleState> states;
  states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SampleState s;
    s.id = static_cast<int>(i);
    s.oracle_pred = oracle_predict(oracle, target.row(i));
    s.history = HistoryBuffer(cfg.acr.history);
    states.push_back(std::move(s));
  }

  result.gamma = compute_gamma_for(result.teacher, target, states);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  // Per-batch scratch, reused across batches.
  std::vector<std::vector<double>> student_logits;
  std::vector<std::vector<double>> teacher_logits;
  std::vector<ProbDist> student_pred;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double e_frac = epoch_fraction(epoch, cfg.epochs);
    if (cfg.gamma_mode == GammaMode::PerEpoch) {
      result.gamma = compute_gamma_for(result.teacher, target, states);
    }

    RngStream shuffle(cfg.seed, StreamId::Shuffle,
                      static_cast<std::uint64_t>(epoch));
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.next_below(i)]);
    }

    double sum_max_conf = 0.0;
    double sum_reliability = 0.0;
    double sum_batch_min_w = 0.0;
    std::size_t rejected = 0;
    std::size_t inverted = 0;
    std::size_t batch_count = 0;

    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      const std::size_t batch_n = end - start;
      const std::uint64_t batch_index = batch_count;
      ++batch_count;

      student_logits.assign(batch_n, std::vector<double>(k));
      teacher_logits.assign(batch_n, std::vector<double>(k));
      student_pred.assign(batch_n, ProbDist());
      std::vector<double> weights(batch_n);
      std::vector<int> pseudo_labels(batch_n);

      // Forward passes, pseudo-labels, reliability, pace weights.
      for (std::size_t j = 0; j < batch_n; ++j) {
        const std::size_t idx = order[start + j];
        SampleState& st = states[idx];
        const auto x = target.row(idx);
        result.student.logits_into(x, student_logits[j]);
        result.teacher.logits_into(x, teacher_logits[j]);
        student_pred[j] = softmax(student_logits[j], 1.0);
        const ProbDist p_teach = softmax(teacher_logits[j], 1.0);

        if (use_fusion) {
          st.last_decision = match_or_conf(p_teach, st.oracle_pred, cfg.fusion);
          st.last_reliability =
              reliability(p_teach, st.oracle_pred, cfg.curriculum.alpha);
        } else {
          st.last_decision =
              FusionDecision{static_cast<int>(p_teach.argmax()),
                             FusionSource::TeacherConf, p_teach.max_value(),
                             st.oracle_pred.max_value()};
          st.last_reliability = 1.0;
        }
        weights[j] = use_pace
                         ? pace_weight(st.last_reliability, e_frac,
                                       cfg.curriculum.pace)
                         : 1.0;
        pseudo_labels[j] = st.last_decision.label;

        sum_max_conf += student_pred[j].max_value();
        sum_reliability += st.last_reliability;
        if (pseudo_labels[j] == kRejected) ++rejected;
      }

      // Probabilistic weight adjustment on a capped candidate subset.
      if (acr_active) {
        const double p_inv = inversion_probability(e_frac, cfg.acr.eta);
        RngStream acr_rng(cfg.seed, StreamId::Acr,
                          static_cast<std::uint64_t>(epoch), batch_index);
        const auto selected =
            select_candidates(batch_n, p_inv, cfg.acr.rho, acr_rng);
        for (std::size_t j : selected) {
          const std::size_t idx = order[start + j];
          const auto d_kl = stability_kl(student_pred[j], states[idx].history,
                                         cfg.acr.min_history);
          const auto [w_out, fired] =
              adjust_weight(weights[j], student_pred[j].max_value(), d_kl,
                            cfg.acr, result.gamma);
          weights[j] = w_out;
          if (fired) ++inverted;
        }
      }

      double min_w = 1.0;
      GradientRecord grad = GradientRecord::zeros(k, target.dim);
      for (std::size_t j = 0; j < batch_n; ++j) {
        const std::size_t idx = order[start + j];
        states[idx].last_weight = weights[j];
        min_w = std::min(min_w, weights[j]);
        LogitLoss ll =
            loss_grad_from_logits(student_logits[j], teacher_logits[j],
                                  pseudo_labels[j], weights[j], cfg.tau,
                                  cfg.kl_tau_squared);
        const auto x = target.row(idx);
        for (int c = 0; c < k; ++c) {
          grad.db[c] += ll.dlogits[c];
          kern.axpy(ll.dlogits[c], x.data(),
                    grad.dw.data() + static_cast<std::size_t>(c) * target.dim,
                    x.size());
        }
      }
      grad.scale(1.0 / static_cast<double>(batch_n));
      opt.step(result.student, grad);
      if (cfg.ema_cadence == EmaCadence::Step) {
        ema_update(result.teacher, result.student, cfg.delta);
      }
      sum_batch_min_w += min_w;

      // History stores this batch's pre-update student predictions.
      for (std::size_t j = 0; j < batch_n; ++j) {
        states[order[start + j]].history.push(std::move(student_pred[j]));
      }
    }
    if (cfg.ema_cadence == EmaCadence::Epoch) {
      ema_update(result.teacher, result.student, cfg.delta);
    }

    EpochTrace trace;
    trace.epoch = epoch;
    trace.mean_max_confidence = sum_max_conf / static_cast<double>(n);
    trace.min_batch_weight_mean =
        sum_batch_min_w / static_cast<double>(batch_count);
    trace.target_accuracy = accuracy(
        [&](std::span<const double> x) {
          return static_cast<int>(result.student.forward(x, 1.0).argmax());
        },
        target);
    trace.rejected_fraction =
        static_cast<double>(rejected) / static_cast<double>(n);
    trace.inverted_fraction =
        static_cast<double>(inverted) / static_cast<double>(n);
    trace.mean_reliability = sum_reliability / static_cast<double>(n);
    result.traces.push_back(trace);

    if (observer) observer(epoch, states);
  }

  return result;
}

}  // namespace costar
