#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dgbfit/series.hpp"

namespace dgbfit {

/// Total / male / female counts for one quantity. Sex-split values (and,
/// for literate/worker counts, the total itself) may be absent when the
/// source file omits those columns.
struct CountTriple {
  std::optional<std::int64_t> total;
  std::optional<std::int64_t> male;
  std::optional<std::int64_t> female;
};

/// One second-tier unit's raw counts for one year.
struct UnitRecord {
  std::string state;
  std::string district;
  int year = 0;
  CountTriple population;  // total always present after loading
  CountTriple literate;
  CountTriple workers;
  std::map<std::string, double> extra;  // non-schema numeric columns
};

/// The units of one stratum, plus the inclusion decision driven by the
/// minimum-unit rule.
struct StratumDataset {
  std::string stratum_id;
  int year = 0;
  std::vector<UnitRecord> units;
  bool included = true;
  std::string exclusion_reason;  // empty when included
};

struct RowError {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

/// Per-file ingestion summary: rows seen, rows kept, and line-numbered
/// reasons for every rejected row.
struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::vector<RowError> rejects;
  std::vector<std::string> warnings;
};

/*
 * Loads unit-level records from a CSV with header
 *   state,district,year,pop_t,pop_m,pop_f,lit_t,lit_m,lit_f,work_t,work_m,work_f
 * Columns may appear in any order; sex-split columns (and the literate and
 * worker columns) may be omitted when only total-level indicators will be
 * requested. Unknown numeric columns are kept as extras for custom
 * indicators.
 *
 * Malformed rows and rows violating the count invariants (male + female
 * must equal the total; literate and worker counts cannot exceed the
 * population) are rejected and reported, not fatal. A missing file or bad
 * header is fatal (FileError / FormatError).
 */
std::vector<UnitRecord> load_units_csv(const std::filesystem::path& path,
                                       LoadReport* report = nullptr);

/// Loads rank-size series from a CSV with header
/// stratum,indicator,year,unit_id,rank,size — the format written by
/// write_series_csv. Rows group by (stratum, indicator, year).
std::vector<RankSizeSeries> load_series_csv(const std::filesystem::path& path,
                                            LoadReport* report = nullptr);

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<RankSizeSeries>& series_list);

/// Indicator value for one unit: population count, LR/WPR percentage, or
/// female-to-male ratio (x100). Throws IndicatorUndefinedError on a zero
/// denominator or a missing column.
double derive_indicator(const UnitRecord& record, const Indicator& indicator);

/// Non-throwing variant; `why` (optional) receives the reason on failure.
std::optional<double> try_derive_indicator(const UnitRecord& record,
                                           const Indicator& indicator,
                                           std::string* why = nullptr);

/// Groups records of `year` into per-state strata, sorted by stratum id.
/// Strata with fewer than min_units units are marked excluded.
std::vector<StratumDataset> group_by_state(
    const std::vector<UnitRecord>& records, int year, int min_units = 5);

/// Pools every district of `year` into a single stratum (country-level
/// aggregate).
StratumDataset pool_all(const std::vector<UnitRecord>& records, int year,
                        std::string stratum_id = "ALL", int min_units = 5);

/*
 * Builds the rank-size series for one stratum: derives the indicator per
 * unit, drops units where it is undefined (each drop is reported through
 * `warnings`), sorts descending and assigns ranks 1..N. Ties order by
 * ascending unit id, so identical inputs always produce identical series.
 * Throws ExcludedStratumError for excluded strata.
 */
RankSizeSeries build_series(const StratumDataset& dataset,
                            const Indicator& indicator,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace dgbfit
