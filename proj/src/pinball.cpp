#include "qpred/pinball.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qpred {

double pinball_loss(double residual, const QuantileLevel& tau) {
  if (!std::isfinite(residual)) {
    throw Error(Errc::non_finite_value, "pinball loss of a non-finite residual");
  }
  const double t = tau.value();
  return residual * (residual <= 0.0 ? t - 1.0 : t);
}

double pinball_risk(std::span<const double> sample, double q, const QuantileLevel& tau) {
  if (sample.empty()) {
    throw Error(Errc::empty_sample, "pinball risk of an empty sample");
  }
  double sum = 0.0;
  for (double y : sample) {
    sum += pinball_loss(y - q, tau);
  }
  return sum;
}

double empirical_quantile(std::span<const double> sample, const QuantileLevel& tau) {
  if (sample.empty()) {
    throw Error(Errc::empty_sample, "quantile of an empty sample");
  }
  const std::size_t r = tau.order_stat_index(sample.size());
  std::vector<double> work(sample.begin(), sample.end());
  std::nth_element(work.begin(), work.begin() + (r - 1), work.end());
  return work[r - 1];
}

}  // namespace qpred
