#include "qpred/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qpred/pinball.hpp"

namespace qpred {

namespace {

inline double sq(double x) { return x * x; }

// Squared distance between the candidate window ending at y_{t-1} and the
// query window ending at y_P, both of length k. 1-based t, 0-based storage.
double candidate_sq_distance(std::span<const double> history, std::size_t t, std::size_t k) {
  const std::size_t P = history.size();
  double acc = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    acc += sq(history[t - 1 - j] - history[P - j]);
  }
  return acc;
}

}  // namespace

double window_distance(const Series& series, std::size_t t, std::size_t n, std::size_t k) {
  if (k < 1 || t <= k || t >= n || n > series.size() + 1) {
    throw Error(Errc::index_out_of_range, "window_distance requires k < t < n <= length+1");
  }
  const auto v = series.values();
  double acc = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    acc += sq(v[t - 1 - j] - v[n - 1 - j]);
  }
  return std::sqrt(acc);
}

NeighborSet neighbor_set(std::span<const double> prefix, std::size_t k, std::size_t lbar) {
  if (k < 1 || lbar < 1) {
    throw Error(Errc::invalid_argument, "window length and neighbor count must be >= 1");
  }
  const std::size_t P = prefix.size();
  if (P < k + 1) {
    throw Error(Errc::no_candidates, "no candidate window: prefix shorter than k + 1");
  }
  const std::size_t count = P - k;
  std::vector<double> d2(count);
  for (std::size_t i = 0; i < count; ++i) {
    d2[i] = candidate_sq_distance(prefix, k + 1 + i, k);
  }
  std::vector<std::uint32_t> picked;
  select_nearest(d2, lbar, picked);
  std::sort(picked.begin(), picked.end());

  NeighborSet out;
  out.indices.reserve(picked.size());
  out.distances.reserve(picked.size());
  for (std::uint32_t slot : picked) {
    out.indices.push_back(k + 1 + slot);
    out.distances.push_back(std::sqrt(d2[slot]));
  }
  return out;
}

double elementary_predict(std::span<const double> prefix, const ExpertKey& key,
                          const QuantileLevel& tau) {
  const std::size_t P = prefix.size();
  if (key.lbar < 1 || P <= key.k + key.lbar) {
    return 0.0;  // n > k + lbar + 1 fails: degenerate branch
  }
  const NeighborSet ns = neighbor_set(prefix, key.k, key.lbar);
  std::vector<double> successors;
  successors.reserve(ns.indices.size());
  for (std::size_t t : ns.indices) {
    successors.push_back(prefix[t - 1]);
  }
  return empirical_quantile(successors, tau);
}

double truncate_prediction(double value, std::size_t n, const ExpertKey& key,
                           const TruncationPolicy& policy) {
  if (!std::isfinite(value)) {
    throw Error(Errc::non_finite_value, "truncation of a non-finite prediction");
  }
  if (!policy.enabled()) {
    return value;
  }
  const double a = policy.cap(key, n);
  return std::clamp(value, -a, a);
}

DistanceEngine::DistanceEngine(std::size_t k, DistanceEngineKind kind) : k_(k), kind_(kind) {
  if (k_ < 1) {
    throw Error(Errc::invalid_argument, "window length must be >= 1");
  }
}

void DistanceEngine::reset() {
  last_length_ = 0;
  d2_.clear();
}

void DistanceEngine::advance(std::span<const double> history) {
  const std::size_t P = history.size();
  if (P == last_length_ && (P < k_ + 1 || d2_.size() == P - k_)) {
    return;  // idempotent re-query within one step
  }
  if (P < k_ + 1) {
    d2_.clear();
    last_length_ = P;
    return;
  }
  if (kind_ == DistanceEngineKind::incremental && P == last_length_ + 1 &&
      last_length_ >= k_) {
    shift_forward(history);
  } else {
    recompute(history);
  }
  last_length_ = P;
}

void DistanceEngine::recompute(std::span<const double> history) {
  const std::size_t count = history.size() - k_;
  d2_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    d2_[i] = candidate_sq_distance(history, k_ + 1 + i, k_);
  }
}

void DistanceEngine::shift_forward(std::span<const double> history) {
  const std::size_t P = history.size();
  const std::size_t count = P - k_;
  d2_.resize(count);
  const double y_new = history[P - 1];        // newest observation y_{P}
  const double y_drop = history[P - 1 - k_];  // value leaving the query window
  for (std::size_t i = count; i-- > 1;) {
    const std::size_t t = k_ + 1 + i;
    d2_[i] = d2_[i - 1] + sq(history[t - 2] - y_new) - sq(history[t - 2 - k_] - y_drop);
  }
  d2_[0] = candidate_sq_distance(history, k_ + 1, k_);
}

void select_nearest(const std::vector<double>& d2, std::size_t limit,
                    std::vector<std::uint32_t>& out) {
  if (limit == 0) {
    out.clear();
    return;
  }
  const std::size_t count = d2.size();
  out.resize(count);
  std::iota(out.begin(), out.end(), 0u);
  const auto nearer = [&d2](std::uint32_t a, std::uint32_t b) {
    if (d2[a] != d2[b]) return d2[a] < d2[b];
    return a < b;
  };
  if (limit < count) {
    std::nth_element(out.begin(), out.begin() + (limit - 1), out.end(), nearer);
    out.resize(limit);
  }
  std::sort(out.begin(), out.end(), nearer);
}

}  // namespace qpred
