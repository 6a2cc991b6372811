#include "costar/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"
#include "costar/rng.hpp"

namespace costar {

LinearSoftmaxModel LinearSoftmaxModel::zeros(int num_classes, int dim) {
  if (num_classes < 2 || dim < 1) {
    throw InvalidConfig("model needs num_classes >= 2 and dim >= 1");
  }
  LinearSoftmaxModel m;
  m.num_classes = num_classes;
  m.dim = dim;
  m.w.assign(static_cast<std::size_t>(num_classes) * dim, 0.0);
  m.b.assign(num_classes, 0.0);
  return m;
}

void LinearSoftmaxModel::logits_into(std::span<const double> x,
                                     std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(dim)) {
    throw ShapeMismatch("forward: feature vector has wrong dimension");
  }
  const auto& kern = kernels::active();
  for (int k = 0; k < num_classes; ++k) {
    out[k] = kern.dot(row(k).data(), x.data(), x.size()) + b[k];
  }
}

Logits LinearSoftmaxModel::logits(std::span<const double> x) const {
  std::vector<double> z(num_classes);
  logits_into(x, z);
  return Logits{std::move(z)};
}

ProbDist LinearSoftmaxModel::forward(std::span<const double> x,
                                     double temperature) const {
  std::vector<double> z(num_classes);
  logits_into(x, z);
  return softmax(z, temperature);
}

GradientRecord GradientRecord::zeros(int num_classes, int dim) {
  GradientRecord g;
  g.dw.assign(static_cast<std::size_t>(num_classes) * dim, 0.0);
  g.db.assign(num_classes, 0.0);
  return g;
}

void GradientRecord::accumulate(const GradientRecord& other) {
  const auto& kern = kernels::active();
  kern.axpy(1.0, other.dw.data(), dw.data(), dw.size());
  kern.axpy(1.0, other.db.data(), db.data(), db.size());
}

void GradientRecord::scale(double a) {
  const auto& kern = kernels::active();
  kern.scale(a, dw.data(), dw.size());
  kern.scale(a, db.data(), db.size());
}

LogitLoss loss_grad_from_logits(std::span<const double> student_logits,
                                std::span<const double> teacher_logits,
                                int pseudo_label, double w, double tau,
                                bool kl_tau_squared) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw InvalidConfig("loss weight w must lie in [0, 1]");
  }
  if (!(tau > 0.0)) throw InvalidConfig("loss temperature must be > 0");
  const std::size_t k = student_logits.size();
  if (teacher_logits.size() != k) {
    throw ShapeMismatch("student/teacher logit lengths differ");
  }
  if (pseudo_label != kRejected &&
      (pseudo_label < 0 || static_cast<std::size_t>(pseudo_label) >= k)) {
    throw InvalidInput("pseudo label out of range");
  }

  std::vector<double> dlogits(k, 0.0);
  double loss = 0.0;

  // Distillation term at temperature tau: KL(student || teacher).
  const double kl_weight = 1.0 - w;
  const double kl_scale = kl_tau_squared ? tau * tau : 1.0;
  if (kl_weight > 0.0) {
    const ProbDist s = softmax(student_logits, tau);
    const ProbDist t = softmax(teacher_logits, tau);
    double kl = 0.0;
    std::vector<double> log_ratio(k);
    for (std::size_t i = 0; i < k; ++i) {
      log_ratio[i] = std::log(s[i]) - std::log(std::max(t[i], kKlFloor));
      kl += s[i] * log_ratio[i];
    }
    loss += kl_weight * kl_scale * kl;
    // d KL / d z_j = s_j * (log_ratio_j - KL) / tau
    const double coeff = kl_weight * kl_scale / tau;
    for (std::size_t i = 0; i < k; ++i) {
      dlogits[i] += coeff * s[i] * (log_ratio[i] - kl);
    }
  }

  // Pseudo-label cross-entropy at temperature 1; skipped when rejected.
  if (pseudo_label != kRejected && w > 0.0) {
    const ProbDist p = softmax(student_logits, 1.0);
    const std::size_t y = static_cast<std::size_t>(pseudo_label);
    loss += w * -std::log(std::max(p[y], kKlFloor));
    for (std::size_t i = 0; i < k; ++i) {
      dlogits[i] += w * (p[i] - (i == y ? 1.0 : 0.0));
    }
  }

  return {loss, std::move(dlogits)};
}

LossGrad grad_total_loss(const LinearSoftmaxModel& student,
                         const LinearSoftmaxModel& teacher,
                         std::span<const double> x, int pseudo_label, double w,
                         double tau, bool kl_tau_squared) {
  std::vector<double> zs(student.num_classes);
  std::vector<double> zt(teacher.num_classes);
  student.logits_into(x, zs);
  teacher.logits_into(x, zt);
  LogitLoss base =
      loss_grad_from_logits(zs, zt, pseudo_label, w, tau, kl_tau_squared);

  const auto& kern = kernels::active();
  LossGrad out;
  out.loss = base.loss;
  out.grad = GradientRecord::zeros(student.num_classes, student.dim);
  for (int k = 0; k < student.num_classes; ++k) {
    kern.axpy(base.dlogits[k], x.data(),
              out.grad.dw.data() + static_cast<std::size_t>(k) * student.dim,
              x.size());
  }
  out.grad.db = std::move(base.dlogits);
  return out;
}

void ema_update(LinearSoftmaxModel& teacher, const LinearSoftmaxModel& student,
                double delta) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidConfig("ema decay must lie in [0, 1]");
  }
  if (teacher.num_classes != student.num_classes ||
      teacher.dim != student.dim) {
    throw ShapeMismatch("ema_update: model shapes differ");
  }
  const auto& kern = kernels::active();
  kern.lerp(delta, student.w.data(), teacher.w.data(), teacher.w.size());
  kern.lerp(delta, student.b.data(), teacher.b.data(), teacher.b.size());
}

AdamW::AdamW(int num_classes, int dim, const OptimizerConfig& cfg)
    : cfg_(cfg),
      mw_(static_cast<std::size_t>(num_classes) * dim, 0.0),
      vw_(static_cast<std::size_t>(num_classes) * dim, 0.0),
      mb_(num_classes, 0.0),
      vb_(num_classes, 0.0) {}

void AdamW::step(LinearSoftmaxModel& model, const GradientRecord& grad) {
  if (grad.dw.size() != mw_.size() || grad.db.size() != mb_.size()) {
    throw ShapeMismatch("optimizer step: gradient shape differs from model");
  }
  ++t_;
  const double bias1 = 1.0 / (1.0 - std::pow(cfg_.beta1, t_));
  const double bias2 = 1.0 / (1.0 - std::pow(cfg_.beta2, t_));
  kernels::AdamParams pw{cfg_.lr,  cfg_.beta1,        cfg_.beta2, cfg_.eps,
                         cfg_.weight_decay, bias1, bias2};
  kernels::AdamParams pb = pw;
  pb.weight_decay = 0.0;
  const auto& kern = kernels::active();
  kern.adamw_update(model.w.data(), grad.dw.data(), mw_.data(), vw_.data(),
                    model.w.size(), pw);
  kern.adamw_update(model.b.data(), grad.db.data(), mb_.data(), vb_.data(),
                    model.b.size(), pb);
}

void train_supervised(LinearSoftmaxModel& model, const LabeledDataset& data,
                      const SourceTrainConfig& cfg) {
  if (data.size() == 0) throw InvalidInput("training dataset is empty");
  if (cfg.epochs < 0) throw InvalidConfig("epochs must be >= 0");
  if (cfg.batch_size < 1) throw InvalidConfig("batch_size must be >= 1");

  const auto& kern = kernels::active();
  AdamW opt(model.num_classes, model.dim, cfg.optimizer);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> z(model.num_classes);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    RngStream shuffle(cfg.seed, StreamId::Shuffle, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.next_below(i)]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      GradientRecord grad = GradientRecord::zeros(model.num_classes, model.dim);
      for (std::size_t pos = start; pos < end; ++pos) {
        const std::size_t idx = order[pos];
        const auto x = data.row(idx);
        model.logits_into(x, z);
        const ProbDist p = softmax(z, 1.0);
        const int y = data.labels[idx];
        // d CE / d z = p - onehot(y)
        for (int k = 0; k < model.num_classes; ++k) {
          const double g = p[k] - (k == y ? 1.0 : 0.0);
          grad.db[k] += g;
          kern.axpy(g, x.data(),
                    grad.dw.data() + static_cast<std::size_t>(k) * model.dim,
                    x.size());
        }
      }
      grad.scale(1.0 / static_cast<double>(end - start));
      opt.step(model, grad);
    }
  }
}

}  // namespace costar
