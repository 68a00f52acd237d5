#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dgbfit {

enum class IndicatorKind {
  population,               // raw head count
  literacy_rate,            // literate / population * 100
  work_participation_rate,  // workers / population * 100
  sex_ratio_literacy,       // female literate / male literate * 100
  sex_ratio_work,           // female workers / male workers * 100
  custom,                   // any extra numeric column
};

/// An indicator selects which per-unit value feeds the rank-size series.
struct Indicator {
  IndicatorKind kind = IndicatorKind::population;
  std::string custom_column;  // only meaningful when kind == custom

  /// Accepts population | lr | wpr | sr-lr | sr-wpr | custom[:<column>]
  /// (case-insensitive). Throws InvalidParameterError on anything else.
  static Indicator parse(std::string_view label);

  std::string label() const;

  friend bool operator==(const Indicator&, const Indicator&) = default;
};

struct SeriesEntry {
  std::string unit_id;
  int rank = 0;
  double size = 0.0;
};

/*
 * One stratum's ordered (rank, size) observations for a single indicator
 * and year. Hard invariants, checked by validate():
 *   - at least one entry; ranks are exactly the set {1..N}
 *   - sizes are finite and non-negative, with at least one strictly positive
 *
 * Series built from ingested unit data are additionally non-increasing in
 * rank (rank 1 holds the largest size); synthetic and reversed series used
 * by the fitting machinery need not be, so that ordering is kept a soft
 * property reported by rank_ordered().
 */
struct RankSizeSeries {
  std::string stratum_id;
  Indicator indicator;
  int year = 0;
  std::vector<SeriesEntry> entries;

  int size() const noexcept { return static_cast<int>(entries.size()); }
  double total_size() const;

  void validate() const;
  bool rank_ordered() const;
};

}  // namespace dgbfit
