#include "qpred/metrics.hpp"

#include <cmath>
#include <vector>

#include "qpred/pinball.hpp"

namespace qpred {

namespace detail {

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

}  // namespace detail

namespace {

void check_paired(std::span<const double> predictions, std::span<const double> observations) {
  if (predictions.size() != observations.size()) {
    throw Error(Errc::length_mismatch, "prediction and observation counts differ");
  }
  if (predictions.empty()) {
    throw Error(Errc::empty_input, "no points to score");
  }
}

}  // namespace

double pinball_metric(std::span<const double> predictions, std::span<const double> observations,
                      const QuantileLevel& tau) {
  check_paired(predictions, observations);
  std::vector<double> losses(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    losses[i] = pinball_loss(observations[i] - predictions[i], tau);
  }
  return detail::stable_sum(losses) / static_cast<double>(losses.size());
}

double ramp_metric(std::span<const double> predictions, std::span<const double> observations) {
  check_paired(predictions, observations);
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (observations[i] > predictions[i]) {
      ++exceed;
    }
  }
  return static_cast<double>(exceed) / static_cast<double>(predictions.size());
}

ErrorStats error_metrics(std::span<const double> predictions,
                         std::span<const double> observations) {
  check_paired(predictions, observations);
  const std::size_t n = predictions.size();
  std::vector<double> abs_errors(n);
  std::vector<double> sqr_errors(n);
  std::vector<double> pct_errors;
  pct_errors.reserve(n);
  ErrorStats stats;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = observations[i] - predictions[i];
    abs_errors[i] = std::abs(e);
    sqr_errors[i] = e * e;
    if (observations[i] != 0.0) {
      pct_errors.push_back(std::abs(e) / std::abs(observations[i]));
    } else {
      ++stats.mape_excluded;
    }
  }
  stats.avg_abs = detail::stable_sum(abs_errors) / static_cast<double>(n);
  stats.avg_sqr = detail::stable_sum(sqr_errors) / static_cast<double>(n);
  if (!pct_errors.empty()) {
    stats.mape_pct =
        100.0 * detail::stable_sum(pct_errors) / static_cast<double>(pct_errors.size());
  }
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = abs_errors[i] - stats.avg_abs;
    centered[i] = d * d;
  }
  const double variance = detail::stable_sum(centered) / static_cast<double>(n);
  stats.abs_std_dev = std::sqrt(std::max(variance, 0.0));
  return stats;
}

MetricsReport compute_report(std::span<const double> predictions,
                             std::span<const double> observations, const QuantileLevel& tau) {
  MetricsReport report;
  report.pinball = pinball_metric(predictions, observations, tau);
  report.ramp = ramp_metric(predictions, observations);
  const ErrorStats stats = error_metrics(predictions, observations);
  report.avg_abs = stats.avg_abs;
  report.avg_sqr = stats.avg_sqr;
  report.mape_pct = stats.mape_pct;
  report.abs_std_dev = stats.abs_std_dev;
  report.n_points = predictions.size();
  report.mape_excluded = stats.mape_excluded;
  return report;
}

}  // namespace qpred
