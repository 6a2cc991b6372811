#include "costar/acr.hpp"

#include <algorithm>
#include <cmath>

#include "costar/errors.hpp"
#include "costar/kernels.hpp"

namespace costar {

HistoryBuffer::HistoryBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw InvalidConfig("history capacity must be >= 1");
}

void HistoryBuffer::push(ProbDist p) {
  entries_.push_back(std::move(p));
  if (entries_.size() > static_cast<std::size_t>(capacity_)) {
    entries_.pop_front();
  }
}

ProbDist HistoryBuffer::mean() const {
  if (entries_.empty()) throw InvalidInput("history buffer is empty");
  const auto& kern = kernels::active();
  std::vector<double> acc(entries_.front().size(), 0.0);
  for (const auto& p : entries_) {
    kern.axpy(1.0, p.values().data(), acc.data(), acc.size());
  }
  kern.scale(1.0 / static_cast<double>(entries_.size()), acc.data(),
             acc.size());
  return ProbDist::trusted(std::move(acc));
}

void AcrConfig::validate() const {
  if (!(eta > 0.0)) throw InvalidConfig("acr eta must be > 0");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidConfig("acr rho must lie in [0, 1]");
  if (!(sigma > 0.0)) throw InvalidConfig("acr sigma must be > 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidConfig("acr lambda must lie in [0, 1]");
  }
  if (history < 1) throw InvalidConfig("acr history must be >= 1");
  if (min_history < 1) throw InvalidConfig("acr min_history must be >= 1");
}

double inversion_probability(double e_frac, double eta) {
  if (!(eta > 0.0)) throw InvalidConfig("acr eta must be > 0");
  if (!(e_frac >= 0.0 && e_frac <= 1.0)) {
    throw InvalidInput("e_frac must lie in [0, 1]");
  }
  return 1.0 - std::exp(-eta * e_frac);
}

std::vector<std::size_t> select_candidates(std::size_t n, double p_inv,
                                           double rho, RngStream& rng) {
  if (n < 1) throw InvalidInput("select_candidates: batch must be non-empty");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.next_unit() < p_inv) candidates.push_back(i);
  }
  const std::size_t cap =
      static_cast<std::size_t>(std::floor(rho * static_cast<double>(n)));
  if (candidates.size() > cap) {
    // Partial Fisher-Yates from the same stream, then restore index order.
    for (std::size_t j = 0; j < cap; ++j) {
      const std::size_t pick =
          j + static_cast<std::size_t>(rng.next_below(candidates.size() - j));
      std::swap(candidates[j], candidates[pick]);
    }
    candidates.resize(cap);
    std::sort(candidates.begin(), candidates.end());
  }
  return candidates;
}

std::optional<double> stability_kl(const ProbDist& current,
                                   const HistoryBuffer& buffer,
                                   int min_history) {
  if (buffer.size() < static_cast<std::size_t>(min_history)) {
    return std::nullopt;
  }
  return kl_div(current, buffer.mean());
}

std::pair<double, bool> adjust_weight(double w, double confidence,
                                      std::optional<double> d_kl,
                                      const AcrConfig& cfg, double gamma) {
  cfg.validate();
  if (!(w >= 0.0 && w <= 1.0)) throw InvalidInput("weight must lie in [0, 1]");
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw InvalidInput("confidence must lie in [0, 1]");
  }
  const bool overconfident =
      d_kl.has_value() && *d_kl < cfg.sigma && confidence > gamma;
  const bool underconfident = confidence < gamma;
  if (overconfident || underconfident) {
    return {(1.0 - w) * cfg.lambda + w * (1.0 - cfg.lambda), true};
  }
  return {w, false};
}

}  // namespace costar
