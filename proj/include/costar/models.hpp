#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "costar/datagen.hpp"
#include "costar/prob.hpp"

namespace costar {

// Pseudo-label value for "no label assigned".
inline constexpr int kRejected = -1;

// Linear-softmax classifier; plays both the teacher and the student role.
struct LinearSoftmaxModel {
  int num_classes = 0;
  int dim = 0;
  std::vector<double> w;  // row-major num_classes x dim
  std::vector<double> b;  // num_classes

  static LinearSoftmaxModel zeros(int num_classes, int dim);

  std::span<const double> row(int k) const {
    return {w.data() + static_cast<std::size_t>(k) * dim,
            static_cast<std::size_t>(dim)};
  }

  // logits = W x + b; out must have num_classes entries.
  void logits_into(std::span<const double> x, std::span<double> out) const;
  Logits logits(std::span<const double> x) const;

  // softmax((W x + b) / temperature)
  ProbDist forward(std::span<const double> x, double temperature) const;
};

struct GradientRecord {
  std::vector<double> dw;
  std::vector<double> db;

  static GradientRecord zeros(int num_classes, int dim);
  void accumulate(const GradientRecord& other);
  void scale(double a);
};

struct LossGrad {
  double loss = 0.0;
  GradientRecord grad;
};

// Gradient of the per-sample loss (1-w)*KL + w*CE with respect to the
// student logits. CE is evaluated at temperature 1 against pseudo_label and
// dropped when pseudo_label == kRejected; KL(student || teacher) is
// evaluated at temperature tau. Returns the loss and d(loss)/d(logits).
struct LogitLoss {
  double loss;
  std::vector<double> dlogits;
};
LogitLoss loss_grad_from_logits(std::span<const double> student_logits,
                                std::span<const double> teacher_logits,
                                int pseudo_label, double w, double tau,
                                bool kl_tau_squared = false);

// Same loss, expanded to parameter space (dW = dlogits * x^T, db = dlogits).
LossGrad grad_total_loss(const LinearSoftmaxModel& student,
                         const LinearSoftmaxModel& teacher,
                         std::span<const double> x, int pseudo_label, double w,
                         double tau, bool kl_tau_squared = false);

// teacher <- delta * teacher + (1 - delta) * student, elementwise.
void ema_update(LinearSoftmaxModel& teacher, const LinearSoftmaxModel& student,
                double delta);

struct OptimizerConfig {
  double lr = 0.001;
  double weight_decay = 0.2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// AdamW with decoupled weight decay; decay applies to W only, not biases.
class AdamW {
 public:
  AdamW(int num_classes, int dim, const OptimizerConfig& cfg);
  void step(LinearSoftmaxModel& model, const GradientRecord& grad);

 private:
  OptimizerConfig cfg_;
  std::vector<double> mw_, vw_, mb_, vb_;
  std::int64_t t_ = 0;
};

struct SourceTrainConfig {
  int epochs = 100;
  int batch_size = 64;
  OptimizerConfig optimizer;
  std::uint64_t seed = 0;
};

// Minimizes mean cross-entropy over the labeled dataset. Deterministic for
// a given seed; zero epochs leaves the model untouched.
void train_supervised(LinearSoftmaxModel& model, const LabeledDataset& data,
                      const SourceTrainConfig& cfg);

}  // namespace costar
