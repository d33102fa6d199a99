#pragma once

#include <cstdint>
#include <vector>

#include "qpred/types.hpp"

namespace qpred {

/// Seeded stationary-process generator spec. The stream is pinned: a
/// mt19937_64 seeded directly, uniforms mapped as (x >> 11 + 0.5) * 2^-53,
/// and normals drawn by the inverse-CDF transform, so identical seeds give
/// bit-identical series on every platform.
struct ProcessSpec {
  enum class Kind { iid_gaussian, ar1, seasonal };

  Kind kind = Kind::iid_gaussian;
  std::size_t length = 1;
  std::uint64_t seed = 0;
  double mu = 0.0;
  double sigma = 1.0;
  double phi = 0.0;                  // ar1 only
  std::size_t period = 7;            // seasonal only
  std::vector<double> amplitudes;    // seasonal only, one per position

  static ProcessSpec iid_gaussian(double mu, double sigma, std::size_t length,
                                  std::uint64_t seed);
  static ProcessSpec ar1(double phi, double sigma, std::size_t length, std::uint64_t seed);
  static ProcessSpec seasonal(std::size_t period, std::vector<double> amplitudes,
                              double sigma, std::size_t length, std::uint64_t seed);

  void validate() const;
};

Series generate(const ProcessSpec& spec);

/// Standard normal CDF via erfc.
double normal_cdf(double z);

/// Inverse standard normal CDF: bracketed bisection refined by Newton steps,
/// accurate to |CDF(z) - p| below 1e-12.
double normal_quantile(double p);

/// mu + sigma * z_tau for the normal family.
double gaussian_tau_quantile(const QuantileLevel& tau, double mu, double sigma);

/// Expected minimal pinball loss given the full past, for specs whose
/// conditional law is tractable: adaptive quadrature of the pinball
/// integrand against the normal density (absolute error < 1e-9).
double lstar_oracle(const ProcessSpec& spec, const QuantileLevel& tau);

/// Exact conditional tau-quantiles phi*y_{t-1} + sigma*z_tau of an ar1 spec
/// along a realization, for targets t = 2..n (length n-1).
std::vector<double> true_conditional_quantile_path(const ProcessSpec& spec,
                                                   const Series& series,
                                                   const QuantileLevel& tau);

}  // namespace qpred
