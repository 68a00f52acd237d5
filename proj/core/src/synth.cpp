#include "dgbfit/synth.hpp"

#include <cmath>
#include <string>

#include "dgbfit/dgb.hpp"
#include "dgbfit/errors.hpp"

namespace dgbfit {

namespace {

std::string unit_label(int index, int n) {
  int width = 1;
  for (int v = n; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  return "u" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') +
         digits;
}

}  // namespace

RankSizeSeries exact_series(double a, double b, int n, double total,
                            std::string stratum_id, int year) {
  if (n < 2) {
    throw InvalidDomainError("exact_series needs at least 2 ranks");
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidDomainError("exact_series total must be positive and finite");
  }
  const DgbParams params(a, b, n);
  RankSizeSeries series;
  series.stratum_id = std::move(stratum_id);
  series.indicator = {IndicatorKind::custom, ""};
  series.year = year;
  series.entries.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    series.entries.push_back({unit_label(r, n), r, total * pmf(params, r)});
  }
  series.validate();
  return series;
}

RankSizeSeries sampled_series(double a, double b, int n, std::size_t draws,
                              std::uint64_t seed, std::string stratum_id,
                              int year) {
  if (n < 2) {
    throw InvalidDomainError("sampled_series needs at least 2 ranks");
  }
  if (draws < 1) {
    throw InvalidDomainError("sampled_series needs at least 1 draw");
  }
  const DgbParams params(a, b, n);
  std::vector<std::size_t> counts(static_cast<std::size_t>(n), 0);
  for (int rank : sample(params, draws, seed)) {
    ++counts[static_cast<std::size_t>(rank - 1)];
  }
  RankSizeSeries series;
  series.stratum_id = std::move(stratum_id);
  series.indicator = {IndicatorKind::custom, ""};
  series.year = year;
  series.entries.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    series.entries.push_back(
        {unit_label(r, n), r,
         static_cast<double>(counts[static_cast<std::size_t>(r - 1)])});
  }
  series.validate();
  return series;
}

}  // namespace dgbfit
