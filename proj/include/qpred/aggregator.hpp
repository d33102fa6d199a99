#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qpred/knn.hpp"
#include "qpred/types.hpp"

namespace qpred {

/// Per-expert bookkeeping: the raw cumulative loss sum (n-1 times the
/// normalized L_{n-1}) and the prediction cached by the last predict() call.
struct ExpertState {
  ExpertKey key;
  double raw_loss = 0.0;
  std::optional<double> last_prediction;
};

/// One step of the mixture: every expert's (truncated) prediction, the
/// normalized weights, and the convex-combination forecast.
struct PredictionRecord {
  std::size_t step = 0;
  std::vector<double> expert_predictions;
  std::vector<double> weights;
  double aggregate = 0.0;
};

enum class ExpertRule { quantile, conditional_mean };
enum class LossRule { pinball, squared };

struct MixtureConfig {
  ExpertGrid grid;
  QuantileLevel tau;
  EtaSchedule eta = EtaSchedule::inverse_sqrt();
  TruncationPolicy truncation = TruncationPolicy::off();
  DistanceEngineKind engine = DistanceEngineKind::incremental;
  ExpertRule expert_rule = ExpertRule::quantile;
  LossRule loss_rule = LossRule::pinball;
};

/// Core weight computation shared by the mixture and its tests: normalized
/// prior_i * exp(-eta * raw_loss_i), evaluated after shifting every exponent
/// by the smallest eta * raw_loss so the largest one is exactly zero.
std::vector<double> normalized_exp_weights(std::span<const double> prior,
                                           std::span<const double> raw_losses, double eta);

/// Exponentially weighted mixture of nearest-neighbor experts, advanced one
/// observation at a time through an explicit predict/update cycle. predict()
/// forms g_n from y_1^{n-1}; update(y_n) charges every expert its loss and
/// moves to step n+1. Single-owner mutable state; runs are deterministic.
class ExpertMixture {
 public:
  explicit ExpertMixture(MixtureConfig config);

  const PredictionRecord& predict();
  void update(double observed);

  std::vector<double> compute_weights() const;

  std::size_t step() const noexcept { return step_; }
  const std::vector<ExpertState>& experts() const noexcept { return experts_; }
  const MixtureConfig& config() const noexcept { return config_; }
  std::span<const double> history() const noexcept { return history_; }
  double aggregate_raw_loss() const noexcept { return aggregate_raw_loss_; }

 private:
  double step_loss(double residual) const;

  MixtureConfig config_;
  std::vector<double> history_;
  std::vector<ExpertState> experts_;
  std::vector<std::size_t> distinct_k_;
  std::vector<DistanceEngine> engines_;          // aligned with distinct_k_
  std::vector<std::vector<std::size_t>> by_k_;   // expert slots per distinct k
  std::size_t step_ = 1;
  bool pending_ = false;
  double aggregate_raw_loss_ = 0.0;
  PredictionRecord record_;
  // scratch buffers reused across steps
  std::vector<std::uint32_t> picked_;
  std::vector<double> table_;
  std::vector<double> sorted_;
};

/// Full trajectory of a run plus the normalized cumulative losses: per-expert
/// L_n(h) and the strategy's L_n(g).
struct SequenceResult {
  std::vector<PredictionRecord> records;
  std::vector<double> expert_avg_loss;
  double aggregate_avg_loss = 0.0;
};

SequenceResult run_sequence(const Series& series, MixtureConfig config);

}  // namespace qpred
