#include "qpred/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qpred/pinball.hpp"

namespace qpred {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

double normal_pdf(double z) {
  constexpr double inv_sqrt_2pi = 0.39894228040143267794;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    // (0,1) strictly, symmetric on the 2^53 grid.
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1p-53;
  }

  double normal() { return normal_quantile(uniform()); }

 private:
  std::mt19937_64 rng_;
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a >= b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// E rho_tau(Z - z_tau) for standard normal Z; the Gaussian L* at unit scale.
double standard_lstar(double tau) {
  const double q = normal_quantile(tau);
  // The integrand vanishes at q and the normal tail beyond |z| = 13 is far
  // below the 1e-9 target, so the two pieces are integrated on finite
  // intervals.
  const double lo = std::min(q, 0.0) - 13.0;
  const double hi = std::max(q, 0.0) + 13.0;
  const auto below = [&](double z) { return (1.0 - tau) * (q - z) * normal_pdf(z); };
  const auto above = [&](double z) { return tau * (z - q) * normal_pdf(z); };
  return integrate(below, lo, q, 2.5e-10) + integrate(above, q, hi, 2.5e-10);
}

}  // namespace

ProcessSpec ProcessSpec::iid_gaussian(double mu, double sigma, std::size_t length,
                                      std::uint64_t seed) {
  ProcessSpec spec;
  spec.kind = Kind::iid_gaussian;
  spec.mu = mu;
  spec.sigma = sigma;
  spec.length = length;
  spec.seed = seed;
  spec.validate();
  return spec;
}

ProcessSpec ProcessSpec::ar1(double phi, double sigma, std::size_t length,
                             std::uint64_t seed) {
  ProcessSpec spec;
  spec.kind = Kind::ar1;
  spec.phi = phi;
  spec.sigma = sigma;
  spec.length = length;
  spec.seed = seed;
  spec.validate();
  return spec;
}

ProcessSpec ProcessSpec::seasonal(std::size_t period, std::vector<double> amplitudes,
                                  double sigma, std::size_t length, std::uint64_t seed) {
  ProcessSpec spec;
  spec.kind = Kind::seasonal;
  spec.period = period;
  spec.amplitudes = std::move(amplitudes);
  spec.sigma = sigma;
  spec.length = length;
  spec.seed = seed;
  spec.validate();
  return spec;
}

void ProcessSpec::validate() const {
  if (length < 1) {
    throw Error(Errc::invalid_argument, "process length must be >= 1");
  }
  // sigma = 0 is admitted as the noise-free limit (exact periodic or
  // constant output), useful for fixtures.
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::invalid_argument, "sigma must be a finite nonnegative value");
  }
  if (!std::isfinite(mu)) {
    throw Error(Errc::invalid_argument, "mu must be finite");
  }
  if (kind == Kind::ar1 && !(std::abs(phi) < 1.0)) {
    throw Error(Errc::invalid_argument, "ar1 requires |phi| < 1 for stationarity");
  }
  if (kind == Kind::seasonal) {
    if (period < 1 || amplitudes.size() != period) {
      throw Error(Errc::invalid_argument, "seasonal spec needs one amplitude per position");
    }
    for (double a : amplitudes) {
      if (!std::isfinite(a)) {
        throw Error(Errc::invalid_argument, "seasonal amplitudes must be finite");
      }
    }
  }
}

Series generate(const ProcessSpec& spec) {
  spec.validate();
  NormalStream stream(spec.seed);
  std::vector<double> values(spec.length);
  switch (spec.kind) {
    case ProcessSpec::Kind::iid_gaussian:
      for (double& v : values) {
        v = spec.mu + spec.sigma * stream.normal();
      }
      break;
    case ProcessSpec::Kind::ar1: {
      const double stationary_sd = spec.sigma / std::sqrt(1.0 - spec.phi * spec.phi);
      values[0] = stationary_sd * stream.normal();
      for (std::size_t t = 1; t < spec.length; ++t) {
        values[t] = spec.phi * values[t - 1] + spec.sigma * stream.normal();
      }
      break;
    }
    case ProcessSpec::Kind::seasonal:
      for (std::size_t t = 0; t < spec.length; ++t) {
        values[t] = spec.amplitudes[t % spec.period] + spec.sigma * stream.normal();
      }
      break;
  }
  return Series(std::move(values));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kSqrt1_2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(Errc::invalid_argument, "normal quantile needs p strictly in (0,1)");
  }
  double lo = -9.5;
  double hi = 9.5;
  for (int i = 0; i < 24; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double z = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double density = normal_pdf(z);
    if (density <= 0.0) break;
    z = std::clamp(z - (normal_cdf(z) - p) / density, lo, hi);
  }
  return z;
}

double gaussian_tau_quantile(const QuantileLevel& tau, double mu, double sigma) {
  if (!(sigma > 0.0)) {
    throw Error(Errc::invalid_argument, "sigma must be positive");
  }
  return mu + sigma * normal_quantile(tau.value());
}

double lstar_oracle(const ProcessSpec& spec, const QuantileLevel& tau) {
  switch (spec.kind) {
    case ProcessSpec::Kind::iid_gaussian:
      return spec.sigma * standard_lstar(tau.value());
    case ProcessSpec::Kind::ar1:
      // Given the infinite past the conditional law is Normal(phi*y, sigma^2),
      // so the expected minimal loss is the iid value at that sigma.
      return spec.sigma * standard_lstar(tau.value());
    case ProcessSpec::Kind::seasonal:
      break;
  }
  throw Error(Errc::unsupported_spec, "L* oracle supports iid_gaussian and ar1 only");
}

std::vector<double> true_conditional_quantile_path(const ProcessSpec& spec,
                                                   const Series& series,
                                                   const QuantileLevel& tau) {
  if (spec.kind != ProcessSpec::Kind::ar1) {
    throw Error(Errc::unsupported_spec, "conditional quantile path requires an ar1 spec");
  }
  if (!(spec.sigma > 0.0)) {
    throw Error(Errc::invalid_argument, "sigma must be positive");
  }
  const double shift = spec.sigma * normal_quantile(tau.value());
  const auto values = series.values();
  std::vector<double> path;
  if (values.size() < 2) return path;
  path.reserve(values.size() - 1);
  for (std::size_t t = 2; t <= values.size(); ++t) {
    path.push_back(spec.phi * values[t - 2] + shift);
  }
  return path;
}

}  // namespace qpred
