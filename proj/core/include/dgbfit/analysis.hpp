#pragma once

#include <span>
#include <string>
#include <vector>

namespace dgbfit {

/// Product-moment correlation. Requires equal lengths >= 3 and nonzero
/// variance in both vectors.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Rank correlation: Pearson correlation of mid-ranks, with tied values
/// receiving the average of their rank positions.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Mid-ranks of a vector (1-based, ties averaged).
std::vector<double> mid_ranks(std::span<const double> values);

/// Two-sided tail probability P(|T_df| > |t|) of Student's t, via the
/// regularized incomplete beta function.
double students_t_two_sided_p(double t, int df);

/// 95%-level significance of a correlation coefficient at sample size n,
/// using the t-approximation t = r sqrt((n-2) / (1-r^2)).
bool correlation_significant_95(double r, int n);

/// One stratum's fitted summary for one indicator, the unit of the
/// cross-stratum analysis.
struct StratumFit {
  std::string stratum;
  std::string indicator;
  double a = 0.0;
  double b = 0.0;
  double up = 0.0;
};

struct CorrelationEntry {
  std::string left;   // e.g. "population.a"
  std::string right;  // e.g. "lr.a"
  double pearson = 0.0;
  double spearman = 0.0;
  bool pearson_significant = false;
  bool spearman_significant = false;
  // least-squares right ~ left; populated only when significant()
  double slope = 0.0;
  double intercept = 0.0;

  bool significant() const {
    return pearson_significant || spearman_significant;
  }
};

struct CorrelationReport {
  int year = 0;
  int n_strata = 0;
  std::vector<std::string> strata;  // common strata, sorted
  std::vector<CorrelationEntry> entries;
};

/*
 * Cross-indicator relationship analysis. For every pair of indicators and
 * each of the fitted quantities {a, b, up}, correlates the per-stratum
 * vectors across the strata shared by all indicators (Pearson and
 * Spearman, each flagged at the 95% level). A least-squares line is
 * attached to pairs whose correlation is flagged significant. The result
 * does not depend on the order of the input rows.
 *
 * Throws InsufficientStrataError when fewer than 3 strata are shared.
 */
CorrelationReport correlate_fits(const std::vector<StratumFit>& fits,
                                 int year);

}  // namespace dgbfit
