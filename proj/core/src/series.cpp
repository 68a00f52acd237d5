#include "dgbfit/series.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "dgbfit/errors.hpp"

#include "accum.hpp"

namespace dgbfit {

namespace {

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

Indicator Indicator::parse(std::string_view label) {
  const std::string low = to_lower(label);
  if (low == "population") return {IndicatorKind::population, ""};
  if (low == "lr") return {IndicatorKind::literacy_rate, ""};
  if (low == "wpr") return {IndicatorKind::work_participation_rate, ""};
  if (low == "sr-lr") return {IndicatorKind::sex_ratio_literacy, ""};
  if (low == "sr-wpr") return {IndicatorKind::sex_ratio_work, ""};
  if (low == "custom") return {IndicatorKind::custom, ""};
  if (low.rfind("custom:", 0) == 0) {
    return {IndicatorKind::custom, low.substr(7)};
  }
  throw InvalidParameterError("unknown indicator label '" + std::string(label) +
                              "' (expected population, lr, wpr, sr-lr, "
                              "sr-wpr or custom[:<column>])");
}

std::string Indicator::label() const {
  switch (kind) {
    case IndicatorKind::population: return "population";
    case IndicatorKind::literacy_rate: return "lr";
    case IndicatorKind::work_participation_rate: return "wpr";
    case IndicatorKind::sex_ratio_literacy: return "sr-lr";
    case IndicatorKind::sex_ratio_work: return "sr-wpr";
    case IndicatorKind::custom:
      return custom_column.empty() ? "custom" : "custom:" + custom_column;
  }
  return "custom";
}

double RankSizeSeries::total_size() const {
  detail::KahanSum sum;
  for (const auto& e : entries) sum.add(e.size);
  return sum.value();
}

void RankSizeSeries::validate() const {
  if (entries.empty()) {
    throw SeriesValidationError("series '" + stratum_id + "' has no entries");
  }
  const int n = size();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  bool any_positive = false;
  for (const auto& e : entries) {
    if (e.rank < 1 || e.rank > n) {
      throw SeriesValidationError("series '" + stratum_id + "': rank " +
                                  std::to_string(e.rank) + " outside [1, " +
                                  std::to_string(n) + "]");
    }
    if (seen[static_cast<std::size_t>(e.rank - 1)]) {
      throw SeriesValidationError("series '" + stratum_id +
                                  "': duplicate rank " +
                                  std::to_string(e.rank));
    }
    seen[static_cast<std::size_t>(e.rank - 1)] = true;
    if (!std::isfinite(e.size) || e.size < 0.0) {
      throw SeriesValidationError("series '" + stratum_id +
                                  "': size at rank " + std::to_string(e.rank) +
                                  " is negative or non-finite");
    }
    if (e.size > 0.0) any_positive = true;
  }
  if (!any_positive) {
    throw SeriesValidationError("series '" + stratum_id +
                                "': all sizes are zero");
  }
}

bool RankSizeSeries::rank_ordered() const {
  std::vector<double> by_rank(entries.size());
  for (const auto& e : entries) {
    by_rank[static_cast<std::size_t>(e.rank - 1)] = e.size;
  }
  for (std::size_t i = 1; i < by_rank.size(); ++i) {
    if (by_rank[i] > by_rank[i - 1]) return false;
  }
  return true;
}

}  // namespace dgbfit
