#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qpred/types.hpp"

namespace qpred {

/// Result of a nearest-window search on a prefix y_1^{n-1}: the matched
/// history positions t (1-based, k < t < n, ascending) and the Euclidean
/// window distances aligned with them.
struct NeighborSet {
  std::vector<std::size_t> indices;
  std::vector<double> distances;
};

/// Euclidean distance between the windows y_{t-k}^{t-1} and y_{n-k}^{n-1}.
double window_distance(const Series& series, std::size_t t, std::size_t n, std::size_t k);

/// The min(lbar, n-k-1) history positions whose windows are closest to the
/// query window at the end of the prefix. Equidistant windows are resolved
/// toward the smaller position.
NeighborSet neighbor_set(std::span<const double> prefix, std::size_t k, std::size_t lbar);

/// Elementary expert output before truncation: the pinball quantile of the
/// neighbor successors when n > k + lbar + 1, and 0 otherwise.
double elementary_predict(std::span<const double> prefix, const ExpertKey& key,
                          const QuantileLevel& tau);

/// Clamp an expert output to [-a, a] with a = min(n^delta, cap(key)) when the
/// policy is on; identity when off.
double truncate_prediction(double value, std::size_t n, const ExpertKey& key,
                           const TruncationPolicy& policy);

enum class DistanceEngineKind { naive, incremental };

/// Squared distances from every candidate window of a fixed length k to the
/// query window at the end of a growing history.
///
/// advance(history) must be called once per step with the history extended by
/// one value; the incremental engine then refreshes all candidate distances
/// with one O(count) diagonal sweep
///   d(t, n+1) = d(t-1, n) + (y_{t-1} - y_n)^2 - (y_{t-1-k} - y_{n-k})^2
/// while the naive engine recomputes every candidate from scratch. Both
/// expose the same candidate layout: slot i holds position t = k + 1 + i.
class DistanceEngine {
 public:
  DistanceEngine(std::size_t k, DistanceEngineKind kind);

  void advance(std::span<const double> history);
  void reset();

  const std::vector<double>& squared_distances() const noexcept { return d2_; }
  std::size_t candidate_count() const noexcept { return d2_.size(); }
  std::size_t window_length() const noexcept { return k_; }

 private:
  void recompute(std::span<const double> history);
  void shift_forward(std::span<const double> history);

  std::size_t k_;
  DistanceEngineKind kind_;
  std::size_t last_length_ = 0;
  std::vector<double> d2_;
};

/// Candidate slots of the min(count, limit) smallest squared distances,
/// ordered by (distance, position). Ties prefer the older window.
void select_nearest(const std::vector<double>& d2, std::size_t limit,
                    std::vector<std::uint32_t>& out);

}  // namespace qpred
