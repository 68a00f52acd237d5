#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dgbfit/analysis.hpp"

namespace dgbfit {

/// One fitted stratum in a report table.
struct FitRow {
  std::string stratum;
  std::string indicator;
  int year = 0;
  int n_units = 0;
  double a = 0.0;
  double b = 0.0;
  double ks = 0.0;
  double entropy = 0.0;  // nats
  double up = 0.0;       // percent
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  int restarts = 0;
};

struct ExclusionRow {
  std::string stratum;
  int n_units = 0;
  std::string reason;
};

struct FitReport {
  std::string indicator;
  int year = 0;
  std::vector<FitRow> rows;
  std::vector<ExclusionRow> exclusions;
};

/*
 * Report files. The CSV table mirrors the human-readable layout
 * (parameters and KS to 3 decimals, entropy to 4, UP to 2); the JSON file
 * carries every field at full precision and is the format the correlate
 * and compare commands consume. Writers emit byte-identical output for
 * identical inputs.
 */
void write_fit_report_csv(const std::filesystem::path& path,
                          const FitReport& report);
void write_fit_exclusions_csv(const std::filesystem::path& path,
                              const FitReport& report);
void write_fit_report_json(const std::filesystem::path& path,
                           const FitReport& report);
FitReport read_fit_report_json(const std::filesystem::path& path);

/// Year-over-year difference for one stratum and indicator.
struct DeltaRow {
  std::string stratum;
  std::string indicator;
  int year_from = 0;
  int year_to = 0;
  double a_from = 0.0, a_to = 0.0, delta_a = 0.0;
  double b_from = 0.0, b_to = 0.0, delta_b = 0.0;
  double up_from = 0.0, up_to = 0.0, delta_up = 0.0;
};

/// Matches rows by (stratum, indicator) and returns the deltas sorted by
/// |delta_up| descending (ties by stratum, then indicator). Throws
/// ComparisonError when the reports share nothing.
std::vector<DeltaRow> compare_reports(const FitReport& from,
                                      const FitReport& to);

void write_delta_csv(const std::filesystem::path& path,
                     const std::vector<DeltaRow>& rows);
void write_delta_json(const std::filesystem::path& path,
                      const std::vector<DeltaRow>& rows);

/// Flattens fit reports into correlation-analysis inputs. When the same
/// indicator label occurs in more than one report, later occurrences are
/// suffixed "#2", "#3", ... so a report can be correlated with itself.
std::vector<StratumFit> collect_fit_points(
    const std::vector<FitReport>& reports);

void write_correlation_csv(const std::filesystem::path& path,
                           const CorrelationReport& report);
void write_correlation_json(const std::filesystem::path& path,
                            const CorrelationReport& report);

}  // namespace dgbfit
