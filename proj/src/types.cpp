#include "qpred/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpred {

Series::Series(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(Errc::empty_series, "series must contain at least one observation");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(Errc::non_finite_value,
                  "non-finite value at position " + std::to_string(i + 1),
                  static_cast<long>(i + 1));
    }
  }
}

double Series::at1(std::size_t t) const {
  if (t < 1 || t > values_.size()) {
    throw Error(Errc::index_out_of_range,
                "series index " + std::to_string(t) + " outside 1.." +
                    std::to_string(values_.size()));
  }
  return values_[t - 1];
}

std::span<const double> Series::prefix(std::size_t length) const {
  if (length > values_.size()) {
    throw Error(Errc::index_out_of_range,
                "prefix length " + std::to_string(length) + " exceeds series length");
  }
  return std::span<const double>(values_.data(), length);
}

Series validate_series(std::vector<double> raw) { return Series(std::move(raw)); }

QuantileLevel::QuantileLevel(double tau) : tau_(tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(Errc::invalid_argument, "tau must lie strictly between 0 and 1");
  }
}

QuantileLevel QuantileLevel::parse(std::string_view text) {
  // Plain decimal only: [0].ddd or d.ddd with total digits small enough for
  // exact 64-bit arithmetic.
  std::size_t pos = 0;
  std::int64_t int_part = 0;
  std::int64_t frac = 0;
  std::int64_t den = 1;
  bool any_digit = false;
  while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
    int_part = int_part * 10 + (text[pos] - '0');
    any_digit = true;
    ++pos;
  }
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      if (den > 100000000000000000LL) {
        throw Error(Errc::invalid_argument, "tau has too many decimal digits");
      }
      frac = frac * 10 + (text[pos] - '0');
      den *= 10;
      any_digit = true;
      ++pos;
    }
  }
  if (!any_digit || pos != text.size()) {
    throw Error(Errc::invalid_argument,
                "tau must be a plain decimal in (0,1), got '" + std::string(text) + "'");
  }
  std::int64_t num = int_part * den + frac;
  if (num <= 0 || num >= den) {
    throw Error(Errc::invalid_argument, "tau must lie strictly between 0 and 1");
  }
  const std::int64_t g = std::gcd(num, den);
  QuantileLevel level(static_cast<double>(num) / static_cast<double>(den));
  level.num_ = num / g;
  level.den_ = den / g;
  return level;
}

std::size_t QuantileLevel::order_stat_index(std::size_t m) const {
  if (m == 0) {
    throw Error(Errc::empty_sample, "quantile of an empty sample");
  }
  if (den_ != 0) {
    const std::int64_t total = static_cast<std::int64_t>(m) * num_;
    if (total % den_ == 0) {
      return static_cast<std::size_t>(total / den_);
    }
    return static_cast<std::size_t>(total / den_) + 1;
  }
  const double x = static_cast<double>(m) * tau_;
  const double rounded = std::round(x);
  if (rounded >= 1.0 && std::abs(x - rounded) < 1e-9) {
    return static_cast<std::size_t>(rounded);
  }
  return static_cast<std::size_t>(std::ceil(x));
}

ExpertGrid::ExpertGrid(std::vector<ExpertKey> keys, std::vector<double> prior)
    : keys_(std::move(keys)), prior_(std::move(prior)) {
  validate();
}

ExpertGrid::ExpertGrid(std::vector<ExpertKey> keys, std::vector<double> prior,
                       std::vector<double> neighbor_fractions)
    : keys_(std::move(keys)),
      prior_(std::move(prior)),
      mode_(NeighborMode::fractional),
      fractions_(std::move(neighbor_fractions)) {
  validate();
  for (double p : fractions_) {
    if (!(p > 0.0 && p < 1.0)) {
      throw Error(Errc::invalid_argument, "neighbor fractions must lie in (0,1)");
    }
  }
  for (const ExpertKey& key : keys_) {
    if (key.lbar > fractions_.size()) {
      throw Error(Errc::invalid_argument,
                  "fractional key index exceeds the fraction list length");
    }
  }
}

void ExpertGrid::validate() const {
  if (keys_.empty()) {
    throw Error(Errc::invalid_argument, "expert grid must contain at least one key");
  }
  if (keys_.size() != prior_.size()) {
    throw Error(Errc::length_mismatch, "prior length must match key count");
  }
  double sum = 0.0;
  for (double b : prior_) {
    if (!(b > 0.0)) {
      throw Error(Errc::invalid_argument, "prior entries must be positive");
    }
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(Errc::invalid_argument, "prior must sum to 1");
  }
  for (const ExpertKey& key : keys_) {
    if (key.k < 1 || key.lbar < 1) {
      throw Error(Errc::invalid_argument, "expert key indices must be >= 1");
    }
  }
  std::vector<ExpertKey> sorted = keys_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(Errc::invalid_argument, "expert keys must be distinct");
  }
}

ExpertGrid ExpertGrid::uniform(std::size_t k_max, std::size_t lbar_max) {
  if (k_max < 1 || lbar_max < 1) {
    throw Error(Errc::invalid_argument, "grid bounds must be >= 1");
  }
  std::vector<ExpertKey> keys;
  keys.reserve(k_max * lbar_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t l = 1; l <= lbar_max; ++l) {
      keys.push_back(ExpertKey{k, l});
    }
  }
  const double b = 1.0 / static_cast<double>(keys.size());
  std::vector<double> prior(keys.size(), b);
  // Repeated addition of 1/N can land a few ulp away from 1; pin the sum by
  // renormalizing the last entry.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < prior.size(); ++i) sum += prior[i];
  prior.back() = 1.0 - sum;
  return ExpertGrid(std::move(keys), std::move(prior));
}

ExpertGrid ExpertGrid::uniform_fractional(std::size_t k_max, std::vector<double> fractions) {
  if (k_max < 1 || fractions.empty()) {
    throw Error(Errc::invalid_argument, "grid bounds must be >= 1");
  }
  std::vector<ExpertKey> keys;
  keys.reserve(k_max * fractions.size());
  for (std::size_t k = 1; k <= k_max; ++k) {
    for (std::size_t l = 1; l <= fractions.size(); ++l) {
      keys.push_back(ExpertKey{k, l});
    }
  }
  const double b = 1.0 / static_cast<double>(keys.size());
  std::vector<double> prior(keys.size(), b);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < prior.size(); ++i) sum += prior[i];
  prior.back() = 1.0 - sum;
  return ExpertGrid(std::move(keys), std::move(prior), std::move(fractions));
}

std::size_t ExpertGrid::effective_lbar(const ExpertKey& key, std::size_t step_n) const {
  if (mode_ == NeighborMode::fixed_count) {
    return key.lbar;
  }
  const double p = fractions_[key.lbar - 1];
  return static_cast<std::size_t>(std::floor(p * static_cast<double>(step_n)));
}

ExpertGrid uniform_grid(std::size_t k_max, std::size_t lbar_max) {
  return ExpertGrid::uniform(k_max, lbar_max);
}

EtaSchedule EtaSchedule::inverse_sqrt() {
  return EtaSchedule([](std::size_t n) { return std::sqrt(1.0 / static_cast<double>(n)); },
                     "inv-sqrt");
}

EtaSchedule EtaSchedule::constant(double eta) {
  if (!(eta > 0.0)) {
    throw Error(Errc::invalid_argument, "eta must be positive");
  }
  return EtaSchedule([eta](std::size_t) { return eta; }, "constant");
}

EtaSchedule::EtaSchedule(std::function<double(std::size_t)> rule, std::string name)
    : rule_(std::move(rule)), name_(std::move(name)) {
  if (!rule_) {
    throw Error(Errc::invalid_argument, "eta rule must be callable");
  }
}

double EtaSchedule::at(std::size_t n) const {
  if (n < 1) {
    throw Error(Errc::index_out_of_range, "eta schedule is defined for n >= 1");
  }
  const double eta = rule_(n);
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw Error(Errc::invalid_argument, "eta schedule produced a non-positive value");
  }
  return eta;
}

TruncationPolicy TruncationPolicy::off() { return TruncationPolicy(); }

TruncationPolicy TruncationPolicy::on(double delta) {
  return on(delta, [](const ExpertKey& key) { return static_cast<double>(key.lbar); });
}

TruncationPolicy TruncationPolicy::on(double delta, CapRule cap_rule) {
  if (!(delta > 0.0 && delta < 0.25)) {
    throw Error(Errc::invalid_argument, "truncation delta must lie in (0, 1/4)");
  }
  if (!cap_rule) {
    throw Error(Errc::invalid_argument, "truncation cap rule must be callable");
  }
  TruncationPolicy policy;
  policy.enabled_ = true;
  policy.delta_ = delta;
  policy.cap_rule_ = std::move(cap_rule);
  return policy;
}

double TruncationPolicy::cap(const ExpertKey& key, std::size_t n) const {
  if (!enabled_) {
    throw Error(Errc::invalid_argument, "cap() called on a disabled truncation policy");
  }
  const double by_step = std::pow(static_cast<double>(n), delta_);
  const double by_key = cap_rule_(key);
  if (!(by_key > 0.0)) {
    throw Error(Errc::invalid_argument, "truncation cap rule must return a positive value");
  }
  return std::min(by_step, by_key);
}

}  // namespace qpred
