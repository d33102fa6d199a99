#include "qpred/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpred/pinball.hpp"

namespace qpred {

std::vector<double> normalized_exp_weights(std::span<const double> prior,
                                           std::span<const double> raw_losses, double eta) {
  if (prior.size() != raw_losses.size() || prior.empty()) {
    throw Error(Errc::length_mismatch, "prior and loss vectors must have equal nonzero size");
  }
  double shift = std::numeric_limits<double>::infinity();
  for (double raw : raw_losses) {
    shift = std::min(shift, eta * raw);
  }
  std::vector<double> weights(prior.size());
  double total = 0.0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    weights[i] = prior[i] * std::exp(shift - eta * raw_losses[i]);
    total += weights[i];
  }
  for (double& w : weights) {
    w /= total;
  }
  return weights;
}

ExpertMixture::ExpertMixture(MixtureConfig config) : config_(std::move(config)) {
  const auto& keys = config_.grid.keys();
  experts_.reserve(keys.size());
  for (const ExpertKey& key : keys) {
    experts_.push_back(ExpertState{key, 0.0, std::nullopt});
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::size_t k = keys[i].k;
    auto it = std::find(distinct_k_.begin(), distinct_k_.end(), k);
    std::size_t slot;
    if (it == distinct_k_.end()) {
      distinct_k_.push_back(k);
      by_k_.emplace_back();
      slot = distinct_k_.size() - 1;
    } else {
      slot = static_cast<std::size_t>(it - distinct_k_.begin());
    }
    by_k_[slot].push_back(i);
  }
  engines_.reserve(distinct_k_.size());
  for (std::size_t k : distinct_k_) {
    engines_.emplace_back(k, config_.engine);
  }
  record_.expert_predictions.assign(experts_.size(), 0.0);
  record_.weights.assign(experts_.size(), 0.0);
}

double ExpertMixture::step_loss(double residual) const {
  if (config_.loss_rule == LossRule::pinball) {
    return pinball_loss(residual, config_.tau);
  }
  return residual * residual;
}

std::vector<double> ExpertMixture::compute_weights() const {
  std::vector<double> raw(experts_.size());
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    raw[i] = experts_[i].raw_loss;
  }
  return normalized_exp_weights(config_.grid.prior(), raw, config_.eta.at(step_));
}

const PredictionRecord& ExpertMixture::predict() {
  const std::size_t n = step_;
  const std::size_t P = history_.size();
  auto& preds = record_.expert_predictions;
  std::fill(preds.begin(), preds.end(), 0.0);

  for (std::size_t slot = 0; slot < distinct_k_.size(); ++slot) {
    const std::size_t k = distinct_k_[slot];
    engines_[slot].advance(history_);
    const auto& d2 = engines_[slot].squared_distances();
    const std::size_t count = d2.size();
    if (count == 0) continue;

    // Largest neighbor count any gate-passing expert of this k needs now.
    std::size_t needed = 0;
    for (std::size_t i : by_k_[slot]) {
      const std::size_t eff = config_.grid.effective_lbar(experts_[i].key, n);
      if (eff >= 1 && P > k + eff) {
        needed = std::max(needed, eff);
      }
    }
    if (needed == 0) continue;

    select_nearest(d2, std::min(needed, count), picked_);
    const std::size_t depth = picked_.size();

    // Nested evaluation: the j nearest successors extend the (j-1) nearest,
    // so one insertion pass yields every expert of this k at once.
    table_.assign(depth + 1, 0.0);
    sorted_.clear();
    double running_sum = 0.0;
    for (std::size_t j = 1; j <= depth; ++j) {
      const std::size_t t = k + 1 + picked_[j - 1];
      const double successor = history_[t - 1];
      if (config_.expert_rule == ExpertRule::quantile) {
        sorted_.insert(std::upper_bound(sorted_.begin(), sorted_.end(), successor), successor);
        table_[j] = sorted_[config_.tau.order_stat_index(j) - 1];
      } else {
        running_sum += successor;
        table_[j] = running_sum / static_cast<double>(j);
      }
    }
    for (std::size_t i : by_k_[slot]) {
      const std::size_t eff = config_.grid.effective_lbar(experts_[i].key, n);
      if (eff >= 1 && P > k + eff) {
        preds[i] = table_[eff];
      }
    }
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    preds[i] = truncate_prediction(preds[i], n, experts_[i].key, config_.truncation);
    experts_[i].last_prediction = preds[i];
    lo = std::min(lo, preds[i]);
    hi = std::max(hi, preds[i]);
  }

  record_.weights = compute_weights();
  double aggregate = 0.0;
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    aggregate += record_.weights[i] * preds[i];
  }
  record_.aggregate = std::clamp(aggregate, lo, hi);
  record_.step = n;
  pending_ = true;
  return record_;
}

void ExpertMixture::update(double observed) {
  if (!pending_) {
    throw Error(Errc::prediction_missing, "update() called without a pending predict()");
  }
  if (!std::isfinite(observed)) {
    throw Error(Errc::non_finite_value, "observed value must be finite");
  }
  for (ExpertState& expert : experts_) {
    expert.raw_loss += step_loss(observed - *expert.last_prediction);
  }
  aggregate_raw_loss_ += step_loss(observed - record_.aggregate);
  history_.push_back(observed);
  ++step_;
  pending_ = false;
}

SequenceResult run_sequence(const Series& series, MixtureConfig config) {
  ExpertMixture mixture(std::move(config));
  SequenceResult out;
  const std::size_t n = series.size();
  out.records.reserve(n);
  for (std::size_t t = 1; t <= n; ++t) {
    out.records.push_back(mixture.predict());
    mixture.update(series.values()[t - 1]);
  }
  out.expert_avg_loss.reserve(mixture.experts().size());
  for (const ExpertState& expert : mixture.experts()) {
    out.expert_avg_loss.push_back(expert.raw_loss / static_cast<double>(n));
  }
  out.aggregate_avg_loss = mixture.aggregate_raw_loss() / static_cast<double>(n);
  return out;
}

}  // namespace qpred
