#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpred {

enum class Errc {
  empty_series,
  non_finite_value,
  empty_sample,
  index_out_of_range,
  no_candidates,
  prediction_missing,
  rank_deficient,
  wrong_lag_count,
  series_too_short,
  no_same_weekday_history,
  length_mismatch,
  empty_input,
  file_not_found,
  parse_error,
  not_increasing,
  unsupported_spec,
  invalid_argument,
};

/// Library-wide error carrying a machine-readable code and, where it makes
/// sense (bad element of a list, bad line of a file), a 1-based position.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message, long position = -1)
      : std::runtime_error(std::move(message)), code_(code), position_(position) {}

  Errc code() const noexcept { return code_; }
  long position() const noexcept { return position_; }

 private:
  Errc code_;
  long position_;
};

/// An observed real-valued time series y_1..y_n. Validated on construction:
/// nonempty, every value finite. Indices in documentation and file formats
/// are 1-based throughout; at1() follows that convention.
class Series {
 public:
  explicit Series(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at1(std::size_t t) const;
  std::span<const double> prefix(std::size_t length) const;

 private:
  std::vector<double> values_;
};

Series validate_series(std::vector<double> raw);

/// Quantile level tau in (0,1). When built from a decimal string the exact
/// rational value is kept so that the "is m*tau an integer" test of the
/// sorted-sample quantile rule is decided exactly; a plain double falls back
/// to a 1e-9 integrality tolerance.
class QuantileLevel {
 public:
  explicit QuantileLevel(double tau);
  static QuantileLevel parse(std::string_view text);

  double value() const noexcept { return tau_; }
  bool has_exact() const noexcept { return den_ != 0; }

  /// 1-based rank of the sorted-sample element realizing the tau-quantile of
  /// a sample of size m: m*tau when that is an integer, ceil(m*tau)
  /// otherwise.
  std::size_t order_stat_index(std::size_t m) const;

 private:
  double tau_ = 0.5;
  std::int64_t num_ = 0;  // reduced exact fraction num_/den_; den_ == 0 when unknown
  std::int64_t den_ = 0;
};

/// Index of one elementary expert: window length k and neighbor count
/// (or, in fractional mode, the index into the neighbor-fraction list).
struct ExpertKey {
  std::size_t k = 1;
  std::size_t lbar = 1;

  friend bool operator==(const ExpertKey&, const ExpertKey&) = default;
  friend auto operator<=>(const ExpertKey&, const ExpertKey&) = default;
};

enum class NeighborMode { fixed_count, fractional };

/// Finite expert grid with its prior mass b_{k,l}. Fixed-count mode reads
/// key.lbar as the neighbor count directly; fractional mode reads it as an
/// index into neighbor_fractions() and resolves floor(p_l * n) at each step.
class ExpertGrid {
 public:
  ExpertGrid(std::vector<ExpertKey> keys, std::vector<double> prior);
  ExpertGrid(std::vector<ExpertKey> keys, std::vector<double> prior,
             std::vector<double> neighbor_fractions);

  static ExpertGrid uniform(std::size_t k_max, std::size_t lbar_max);
  static ExpertGrid uniform_fractional(std::size_t k_max, std::vector<double> fractions);

  const std::vector<ExpertKey>& keys() const noexcept { return keys_; }
  const std::vector<double>& prior() const noexcept { return prior_; }
  NeighborMode mode() const noexcept { return mode_; }
  const std::vector<double>& neighbor_fractions() const noexcept { return fractions_; }
  std::size_t size() const noexcept { return keys_.size(); }

  /// Neighbor count used by a key at prediction step n.
  std::size_t effective_lbar(const ExpertKey& key, std::size_t step_n) const;

 private:
  void validate() const;

  std::vector<ExpertKey> keys_;
  std::vector<double> prior_;
  NeighborMode mode_ = NeighborMode::fixed_count;
  std::vector<double> fractions_;
};

ExpertGrid uniform_grid(std::size_t k_max, std::size_t lbar_max);

/// Learning-rate schedule n -> eta_n > 0. Default is eta_n = sqrt(1/n).
class EtaSchedule {
 public:
  static EtaSchedule inverse_sqrt();
  static EtaSchedule constant(double eta);
  EtaSchedule(std::function<double(std::size_t)> rule, std::string name);

  double at(std::size_t n) const;
  const std::string& name() const noexcept { return name_; }

 private:
  std::function<double(std::size_t)> rule_;
  std::string name_;
};

/// Expert-output truncation T_a with a = min(n^delta, cap(key)). Off by
/// default; when on, delta must lie in (0, 1/4). The default cap is the
/// key's second index, matching T_{min(n^delta, l)}.
class TruncationPolicy {
 public:
  using CapRule = std::function<double(const ExpertKey&)>;

  static TruncationPolicy off();
  static TruncationPolicy on(double delta);
  static TruncationPolicy on(double delta, CapRule cap_rule);

  bool enabled() const noexcept { return enabled_; }
  double delta() const noexcept { return delta_; }
  double cap(const ExpertKey& key, std::size_t n) const;

 private:
  TruncationPolicy() = default;

  bool enabled_ = false;
  double delta_ = 0.2;
  CapRule cap_rule_;
};

}  // namespace qpred
