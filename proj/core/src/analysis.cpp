#include "dgbfit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "dgbfit/errors.hpp"

namespace dgbfit {

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw DimensionMismatchError("correlation inputs differ in length (" +
                                 std::to_string(xs.size()) + " vs " +
                                 std::to_string(ys.size()) + ")");
  }
  if (xs.size() < 3) {
    throw InvalidDomainError("correlation needs at least 3 observations");
  }
}

// Continued-fraction core of the regularized incomplete beta (modified
// Lentz iteration).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-14;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw InvalidDomainError("correlation undefined: zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto rx = mid_ranks(xs);
  const auto ry = mid_ranks(ys);
  return pearson(rx, ry);
}

double students_t_two_sided_p(double t, int df) {
  if (df < 1) {
    throw InvalidDomainError("degrees of freedom must be at least 1");
  }
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return reg_inc_beta(df / 2.0, 0.5, x);
}

bool correlation_significant_95(double r, int n) {
  if (n < 3) {
    throw InvalidDomainError("significance needs at least 3 observations");
  }
  const double df = static_cast<double>(n - 2);
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return true;  // |r| = 1, p = 0
  const double t = std::abs(r) * std::sqrt(df / denom);
  return students_t_two_sided_p(t, n - 2) < 0.05;
}

CorrelationReport correlate_fits(const std::vector<StratumFit>& fits,
                                 int year) {
  std::map<std::string, std::map<std::string, const StratumFit*>> by_indicator;
  for (const auto& fit : fits) {
    auto& per_stratum = by_indicator[fit.indicator];
    if (!per_stratum.emplace(fit.stratum, &fit).second) {
      throw InvalidParameterError("duplicate fit for stratum '" + fit.stratum +
                                  "', indicator '" + fit.indicator + "'");
    }
  }
  if (by_indicator.size() < 2) {
    throw InvalidDomainError(
        "correlation analysis needs at least two indicators");
  }

  // strata present for every indicator, in sorted order
  std::vector<std::string> common;
  for (const auto& [stratum, fit] : by_indicator.begin()->second) {
    (void)fit;
    bool everywhere = true;
    for (const auto& [ind, per_stratum] : by_indicator) {
      (void)ind;
      if (per_stratum.find(stratum) == per_stratum.end()) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) common.push_back(stratum);
  }
  if (common.size() < 3) {
    throw InsufficientStrataError(
        "only " + std::to_string(common.size()) +
        " strata shared across indicators; need at least 3");
  }

  CorrelationReport report;
  report.year = year;
  report.n_strata = static_cast<int>(common.size());
  report.strata = common;

  const char* const stats[] = {"a", "b", "up"};
  auto values = [&](const std::string& indicator,
                    const char* stat) -> std::vector<double> {
    std::vector<double> out;
    out.reserve(common.size());
    for (const auto& stratum : common) {
      const StratumFit& f = *by_indicator[indicator][stratum];
      if (std::string_view(stat) == "a") out.push_back(f.a);
      else if (std::string_view(stat) == "b") out.push_back(f.b);
      else out.push_back(f.up);
    }
    return out;
  };

  std::vector<std::string> indicators;
  indicators.reserve(by_indicator.size());
  for (const auto& [ind, per_stratum] : by_indicator) {
    (void)per_stratum;
    indicators.push_back(ind);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < indicators.size(); ++i) {
    for (std::size_t j = i + 1; j < indicators.size(); ++j) {
      for (const char* stat : stats) {
        const auto xs = values(indicators[i], stat);
        const auto ys = values(indicators[j], stat);
        CorrelationEntry entry;
        entry.left = indicators[i] + "." + stat;
        entry.right = indicators[j] + "." + stat;
        entry.slope = nan;
        entry.intercept = nan;
        try {
          entry.pearson = pearson(xs, ys);
          entry.pearson_significant =
              correlation_significant_95(entry.pearson, report.n_strata);
          entry.spearman = spearman(xs, ys);
          entry.spearman_significant =
              correlation_significant_95(entry.spearman, report.n_strata);
        } catch (const InvalidDomainError&) {
          entry.pearson = nan;
          entry.spearman = nan;
          entry.pearson_significant = false;
          entry.spearman_significant = false;
        }
        if (entry.significant()) {
          const double n = static_cast<double>(xs.size());
          const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
          const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
          double sxx = 0.0, sxy = 0.0;
          for (std::size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
          }
          if (sxx > 0.0) {
            entry.slope = sxy / sxx;
            entry.intercept = my - entry.slope * mx;
          }
        }
        report.entries.push_back(std::move(entry));
      }
    }
  }
  return report;
}

}  // namespace dgbfit
