#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qpred/aggregator.hpp"
#include "qpred/types.hpp"

namespace qpred {

/// Autoregression y_t ~ intercept + sum_i coefficients[i-1] * y_{t-i}.
struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;  // lag 1..p

  std::size_t order() const noexcept { return coefficients.size(); }
};

/// Mean of the last min(window, length) observations.
double ma_predict(std::span<const double> prefix, std::size_t window);

/// Mean of the most recent observations sharing the target's position in the
/// weekly (period-s) cycle: indices t < n with t = n (mod s). window empty
/// means all matching history.
double dow_ma_predict(std::span<const double> prefix, std::size_t period,
                      std::optional<std::size_t> window = std::nullopt);

/// Ordinary least squares fit over rows (y_{t-1},...,y_{t-p}) -> y_t.
LinearModel ar_fit(std::span<const double> series, std::size_t order);

/// One-step forecast from the last p values, most recent first.
double ar_predict(const LinearModel& model, std::span<const double> recent);

struct IrlsOptions {
  double epsilon = 1e-6;  // residual floor in the reweighting
  int max_iter = 100;
  double tol = 1e-8;      // max absolute coefficient change
};

struct IrlsResult {
  LinearModel model;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;  // pinball objective of the returned model
};

/// Quantile autoregression by iteratively reweighted least squares: OLS warm
/// start, weights |tau - 1[r <= 0]| / max(|r|, epsilon), best iterate kept.
/// Non-convergence is reported through the flag, not an error.
IrlsResult qar_fit_irls(std::span<const double> series, std::size_t order,
                        const QuantileLevel& tau, const IrlsOptions& options = {});

/// Pinball objective of a model on a series, summed over t = p+1..n.
double qar_objective(std::span<const double> series, const LinearModel& model,
                     const QuantileLevel& tau);

/// Additive Holt-Winters state after absorbing the fitted series.
struct HoltWintersModel {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  std::size_t season_length = 1;
  double level = 0.0;
  double trend = 0.0;
  std::vector<double> seasonals;   // position (t-1) % season_length
  std::size_t fitted_length = 0;
  double insample_mse = 0.0;
};

/// Additive Holt-Winters with first/second-season initialization and
/// smoothing parameters picked from the {0, step, 2*step, ..., 1}^3 lattice
/// by in-sample one-step-ahead MSE (lexicographically smallest tuple on
/// ties). Requires at least two full seasons.
HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length,
                                  double grid_step = 0.1);

/// level + trend + the upcoming seasonal component.
double hw_predict(const HoltWintersModel& model);

/// Conditional-mean twin of the quantile mixture: the same grid/weighting
/// pipeline with mean experts and squared-error weight updates.
SequenceResult mem_run(const Series& series, ExpertGrid grid,
                       EtaSchedule eta = EtaSchedule::inverse_sqrt(),
                       TruncationPolicy truncation = TruncationPolicy::off(),
                       DistanceEngineKind engine = DistanceEngineKind::incremental);

}  // namespace qpred
