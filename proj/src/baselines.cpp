#include "qpred/baselines.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qpred/pinball.hpp"

namespace qpred {

namespace {

// Design matrix [1, y_{t-1}, ..., y_{t-p}] and target y_t for t = p+1..n.
void build_design(std::span<const double> y, std::size_t p, Eigen::MatrixXd& X,
                  Eigen::VectorXd& b) {
  const std::size_t rows = y.size() - p;
  X.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p + 1));
  b.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = p + 1 + r;  // 1-based target index
    X(static_cast<Eigen::Index>(r), 0) = 1.0;
    for (std::size_t j = 1; j <= p; ++j) {
      X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = y[t - j - 1];
    }
    b(static_cast<Eigen::Index>(r)) = y[t - 1];
  }
}

LinearModel to_model(const Eigen::VectorXd& beta) {
  LinearModel model;
  model.intercept = beta(0);
  model.coefficients.assign(beta.data() + 1, beta.data() + beta.size());
  return model;
}

}  // namespace

double ma_predict(std::span<const double> prefix, std::size_t window) {
  if (prefix.empty()) {
    throw Error(Errc::empty_input, "moving average needs at least one observation");
  }
  if (window < 1) {
    throw Error(Errc::invalid_argument, "window must be >= 1");
  }
  const std::size_t m = std::min(window, prefix.size());
  double sum = 0.0;
  for (std::size_t i = prefix.size() - m; i < prefix.size(); ++i) {
    sum += prefix[i];
  }
  return sum / static_cast<double>(m);
}

double dow_ma_predict(std::span<const double> prefix, std::size_t period,
                      std::optional<std::size_t> window) {
  if (period < 1) {
    throw Error(Errc::invalid_argument, "period must be >= 1");
  }
  if (window && *window < 1) {
    throw Error(Errc::invalid_argument, "window must be >= 1");
  }
  const std::size_t n = prefix.size() + 1;  // index being forecast
  std::vector<double> matching;
  for (std::size_t t = 1; t <= prefix.size(); ++t) {
    if (t % period == n % period) {
      matching.push_back(prefix[t - 1]);
    }
  }
  if (matching.empty()) {
    throw Error(Errc::no_same_weekday_history,
                "no past observation shares the target's position in the cycle");
  }
  const std::size_t m = window ? std::min(*window, matching.size()) : matching.size();
  double sum = 0.0;
  for (std::size_t i = matching.size() - m; i < matching.size(); ++i) {
    sum += matching[i];
  }
  return sum / static_cast<double>(m);
}

LinearModel ar_fit(std::span<const double> series, std::size_t order) {
  if (order < 1) {
    throw Error(Errc::invalid_argument, "order must be >= 1");
  }
  if (series.size() < order + 2) {
    throw Error(Errc::series_too_short, "need length >= order + 2 observations");
  }
  Eigen::MatrixXd X;
  Eigen::VectorXd b;
  build_design(series, order, X, b);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw Error(Errc::rank_deficient, "singular autoregressive design");
  }
  return to_model(qr.solve(b));
}

double ar_predict(const LinearModel& model, std::span<const double> recent) {
  if (recent.size() != model.coefficients.size()) {
    throw Error(Errc::wrong_lag_count, "expected exactly one value per lag");
  }
  double pred = model.intercept;
  for (std::size_t i = 0; i < recent.size(); ++i) {
    pred += model.coefficients[i] * recent[i];
  }
  return pred;
}

double qar_objective(std::span<const double> series, const LinearModel& model,
                     const QuantileLevel& tau) {
  const std::size_t p = model.order();
  if (series.size() < p + 1) {
    throw Error(Errc::series_too_short, "series shorter than the model order");
  }
  double sum = 0.0;
  for (std::size_t t = p + 1; t <= series.size(); ++t) {
    double fitted = model.intercept;
    for (std::size_t j = 1; j <= p; ++j) {
      fitted += model.coefficients[j - 1] * series[t - j - 1];
    }
    sum += pinball_loss(series[t - 1] - fitted, tau);
  }
  return sum;
}

IrlsResult qar_fit_irls(std::span<const double> series, std::size_t order,
                        const QuantileLevel& tau, const IrlsOptions& options) {
  if (!(options.epsilon > 0.0) || options.max_iter < 1 || !(options.tol > 0.0)) {
    throw Error(Errc::invalid_argument, "invalid IRLS options");
  }
  if (order < 1) {
    throw Error(Errc::invalid_argument, "order must be >= 1");
  }
  if (series.size() < order + 2) {
    throw Error(Errc::series_too_short, "need length >= order + 2 observations");
  }
  Eigen::MatrixXd X;
  Eigen::VectorXd b;
  build_design(series, order, X, b);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw Error(Errc::rank_deficient, "singular autoregressive design");
  }
  Eigen::VectorXd beta = qr.solve(b);

  const double t = tau.value();
  IrlsResult best;
  best.model = to_model(beta);
  best.objective = qar_objective(series, best.model, tau);

  Eigen::VectorXd weights(b.size());
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd residuals = b - X * beta;
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
      const double r = residuals(i);
      const double tilt = std::abs(t - (r <= 0.0 ? 1.0 : 0.0));
      weights(i) = tilt / std::max(std::abs(r), options.epsilon);
    }
    const Eigen::MatrixXd A = X.transpose() * weights.asDiagonal() * X;
    const Eigen::VectorXd rhs = X.transpose() * (weights.asDiagonal() * b);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
      break;
    }
    const Eigen::VectorXd next = ldlt.solve(rhs);
    if (!next.allFinite()) {
      break;
    }
    const double shift = (next - beta).cwiseAbs().maxCoeff();
    beta = next;
    best.iterations = iter;

    const LinearModel candidate = to_model(beta);
    const double objective = qar_objective(series, candidate, tau);
    if (objective < best.objective) {
      best.objective = objective;
      best.model = candidate;
    }
    if (shift < options.tol) {
      best.converged = true;
      break;
    }
  }
  return best;
}

HoltWintersModel holt_winters_fit(std::span<const double> series, std::size_t season_length,
                                  double grid_step) {
  if (season_length < 1) {
    throw Error(Errc::invalid_argument, "season length must be >= 1");
  }
  if (!(grid_step > 0.0 && grid_step <= 1.0)) {
    throw Error(Errc::invalid_argument, "grid step must lie in (0, 1]");
  }
  const std::size_t s = season_length;
  const std::size_t n = series.size();
  if (n < 2 * s) {
    throw Error(Errc::series_too_short, "need at least two full seasons");
  }

  double first_mean = 0.0;
  double second_mean = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    first_mean += series[i];
    second_mean += series[s + i];
  }
  first_mean /= static_cast<double>(s);
  second_mean /= static_cast<double>(s);

  const double level0 = first_mean;
  const double trend0 = (second_mean - first_mean) / static_cast<double>(s);
  std::vector<double> seasonal0(s);
  for (std::size_t i = 0; i < s; ++i) {
    seasonal0[i] = series[i] - first_mean;
  }

  std::vector<double> lattice;
  for (std::size_t i = 0; static_cast<double>(i) * grid_step <= 1.0 + 1e-12; ++i) {
    lattice.push_back(std::min(1.0, static_cast<double>(i) * grid_step));
  }
  if (lattice.back() < 1.0) {
    lattice.push_back(1.0);
  }

  const auto simulate = [&](double alpha, double beta, double gamma,
                            HoltWintersModel* final_state) {
    double level = level0;
    double trend = trend0;
    std::vector<double> seasonal = seasonal0;
    double sse = 0.0;
    for (std::size_t t = s + 1; t <= n; ++t) {
      const std::size_t pos = (t - 1) % s;
      const double forecast = level + trend + seasonal[pos];
      const double y = series[t - 1];
      const double e = y - forecast;
      sse += e * e;
      const double next_level = alpha * (y - seasonal[pos]) + (1.0 - alpha) * (level + trend);
      trend = beta * (next_level - level) + (1.0 - beta) * trend;
      seasonal[pos] = gamma * (y - next_level) + (1.0 - gamma) * seasonal[pos];
      level = next_level;
    }
    const double mse = sse / static_cast<double>(n - s);
    if (final_state != nullptr) {
      final_state->level = level;
      final_state->trend = trend;
      final_state->seasonals = std::move(seasonal);
      final_state->insample_mse = mse;
    }
    return mse;
  };

  double best_mse = std::numeric_limits<double>::infinity();
  double best_alpha = 0.0, best_beta = 0.0, best_gamma = 0.0;
  for (double alpha : lattice) {
    for (double beta : lattice) {
      for (double gamma : lattice) {
        const double mse = simulate(alpha, beta, gamma, nullptr);
        if (mse < best_mse) {
          best_mse = mse;
          best_alpha = alpha;
          best_beta = beta;
          best_gamma = gamma;
        }
      }
    }
  }

  HoltWintersModel model;
  model.alpha = best_alpha;
  model.beta = best_beta;
  model.gamma = best_gamma;
  model.season_length = s;
  model.fitted_length = n;
  simulate(best_alpha, best_beta, best_gamma, &model);
  return model;
}

double hw_predict(const HoltWintersModel& model) {
  if (model.season_length < 1 || model.seasonals.size() != model.season_length) {
    throw Error(Errc::invalid_argument, "malformed Holt-Winters model");
  }
  const std::size_t pos = model.fitted_length % model.season_length;
  return model.level + model.trend + model.seasonals[pos];
}

SequenceResult mem_run(const Series& series, ExpertGrid grid, EtaSchedule eta,
                       TruncationPolicy truncation, DistanceEngineKind engine) {
  MixtureConfig config{std::move(grid),    QuantileLevel(0.5), std::move(eta),
                       std::move(truncation), engine,          ExpertRule::conditional_mean,
                       LossRule::squared};
  return run_sequence(series, std::move(config));
}

}  // namespace qpred
