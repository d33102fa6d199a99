#pragma once

#include <span>

#include "qpred/types.hpp"

namespace qpred {

/// Pooled evaluation figures for a set of one-step forecasts.
struct MetricsReport {
  double pinball = 0.0;
  double ramp = 0.0;
  double avg_abs = 0.0;
  double avg_sqr = 0.0;
  double mape_pct = 0.0;
  double abs_std_dev = 0.0;
  std::size_t n_points = 0;
  std::size_t mape_excluded = 0;  // zero-valued observations skipped by MAPE
};

/// Mean pinball loss of observations around forecasts.
double pinball_metric(std::span<const double> predictions, std::span<const double> observations,
                      const QuantileLevel& tau);

/// Fraction of observations strictly exceeding the forecast; ties count as
/// non-exceeding. Calibrated quantile forecasts land near 1 - tau.
double ramp_metric(std::span<const double> predictions, std::span<const double> observations);

struct ErrorStats {
  double avg_abs = 0.0;
  double avg_sqr = 0.0;
  double mape_pct = 0.0;
  double abs_std_dev = 0.0;  // population std of the absolute errors
  std::size_t mape_excluded = 0;
};

ErrorStats error_metrics(std::span<const double> predictions,
                         std::span<const double> observations);

MetricsReport compute_report(std::span<const double> predictions,
                             std::span<const double> observations, const QuantileLevel& tau);

namespace detail {
/// Neumaier-compensated sum; keeps pooled metrics independent of cell order.
double stable_sum(std::span<const double> values);
}  // namespace detail

}  // namespace qpred
