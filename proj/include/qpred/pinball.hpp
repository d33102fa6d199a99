#pragma once

#include <span>

#include "qpred/types.hpp"

namespace qpred {

/// Pinball (tilted absolute) loss rho_tau(y) = y * (tau - 1[y <= 0]).
double pinball_loss(double residual, const QuantileLevel& tau);

/// Sum of pinball losses of a sample around a candidate value q.
double pinball_risk(std::span<const double> sample, double q, const QuantileLevel& tau);

/// Tau-quantile of a finite sample by the sorted-sample rule: the
/// ceil(m*tau)-th smallest element, or the (m*tau)-th when m*tau is an
/// integer. Always an element of the sample; minimizes pinball_risk.
double empirical_quantile(std::span<const double> sample, const QuantileLevel& tau);

}  // namespace qpred
