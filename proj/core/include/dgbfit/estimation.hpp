#pragma once

#include <array>
#include <utility>
#include <vector>

#include "dgbfit/dgb.hpp"
#include "dgbfit/errors.hpp"
#include "dgbfit/series.hpp"

namespace dgbfit {

/// Knobs for fit_mle. Tolerances apply to the weight-normalized objective
/// (the log-likelihood divided by the total size), which makes convergence
/// behaviour independent of the measurement unit of the sizes.
struct FitConfig {
  int min_units = 5;       // strata below this are excluded, not fitted
  double grad_tol = 1e-8;  // infinity norm of the normalized gradient
  int max_iters = 10000;   // per restart
  double param_clamp = 10.0;  // search box [-clamp, clamp] per exponent
  std::vector<std::array<double, 2>> restart_grid = default_restart_grid();

  /// The 3x3 grid {-1, 0, 1}^2.
  static std::vector<std::array<double, 2>> default_restart_grid();

  void validate() const;
};

struct FitResult {
  DgbParams params;
  double log_likelihood = 0.0;
  double ks = 0.0;
  double entropy = 0.0;  // nats
  double up = 0.0;       // percent; NaN when n < 2
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
};

/// Every restart ended away from a stationary point. Carries the best
/// point found so callers can still report it.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& message, FitResult best)
      : Error(message), best_(std::move(best)) {}

  const FitResult& best() const noexcept { return best_; }

private:
  FitResult best_;
};

/*
 * Weighted log-likelihood of a rank-size series under the DGB model:
 *
 *     ll(a, b) = sum_i x_i * log f_(a,b)(r_i)
 *              = sum_i x_i [ b log(N+1-r_i) - a log r_i + log A ]
 *
 * The sizes act as observation weights and may be non-integer; zero sizes
 * contribute nothing.
 */
double log_likelihood(const RankSizeSeries& series, double a, double b);

/// Analytic gradient (d/da, d/db) of log_likelihood:
///   d/da = sum_i x_i (E[log r] - log r_i)
///   d/db = sum_i x_i (log(N+1-r_i) - E[log(N+1-r)])
/// with expectations taken under the DGB pmf at (a, b).
std::pair<double, double> grad_log_likelihood(const RankSizeSeries& series,
                                              double a, double b);

/*
 * Maximum likelihood fit of (a, b) over the clamp box.
 *
 * Gradient ascent with backtracking line search runs from each start in
 * config.restart_grid and falls back to Nelder-Mead on line-search failure;
 * the best terminal point is polished with a damped Newton step using the
 * analytic Hessian. When the likelihood ridge is degenerate (tied optima,
 * e.g. two-rank series where only a+b is identified) the smallest-norm
 * maximizer is returned.
 *
 * Throws StratumTooSmallError when the series is shorter than
 * config.min_units, and NonConvergenceError (carrying the best point) when
 * no restart reaches a stationary point.
 */
FitResult fit_mle(const RankSizeSeries& series,
                  const FitConfig& config = FitConfig());

}  // namespace dgbfit
