// dgbfit: fit rank-size data to the discrete generalized beta distribution,
// score fit quality, and track distributional uncertainty across strata.
//
// Subcommands:
//   fit        fit every stratum in a units or series CSV
//   correlate  cross-indicator correlations over fit reports
//   compare    year-over-year deltas between two fit reports
//   simulate   draw a synthetic series usable as fit input
//
// Exit codes: 0 success, 1 validation error, 2 I/O or parse error,
// 3 fit completed but at least one stratum did not converge.

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "dgbfit/analysis.hpp"
#include "dgbfit/data.hpp"
#include "dgbfit/errors.hpp"
#include "dgbfit/estimation.hpp"
#include "dgbfit/report.hpp"
#include "dgbfit/synth.hpp"

#include "CLI11.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitNonConvergence = 3;

struct OutputOptions {
  std::string out_dir = ".";
  std::string format = "both";

  bool csv() const { return format == "csv" || format == "both"; }
  bool json() const { return format == "json" || format == "both"; }
};

void add_output_options(CLI::App* cmd, OutputOptions* out) {
  cmd->add_option("--out-dir", out->out_dir, "Directory for report files")
      ->capture_default_str();
  cmd->add_option("--format", out->format, "Report format")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
      c = '_';
    }
  }
  return out;
}

void print_load_summary(const dgbfit::LoadReport& report) {
  std::cout << "rows read: " << report.rows_read
            << ", accepted: " << report.rows_accepted
            << ", rejected: " << report.rejects.size() << "\n";
  const std::size_t shown = std::min<std::size_t>(report.rejects.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    std::cerr << "reject (line " << report.rejects[i].line
              << "): " << report.rejects[i].message << "\n";
  }
  if (report.rejects.size() > shown) {
    std::cerr << "... " << (report.rejects.size() - shown)
              << " more rejected rows\n";
  }
  for (const auto& w : report.warnings) {
    std::cerr << "warning: " << w << "\n";
  }
}

bool file_has_series_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw dgbfit::FileError("cannot open '" + path.string() + "'");
  }
  std::string header;
  while (std::getline(in, header)) {
    if (header.find_first_not_of(" \t\r\n") != std::string::npos) break;
  }
  std::transform(header.begin(), header.end(), header.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return header.find("rank") != std::string::npos &&
         header.find("size") != std::string::npos;
}

// ---------------------------------------------------------------------------
// fit

struct FitCmdOptions {
  std::string input;
  std::string indicator = "population";
  std::optional<int> year;
  int min_units = 5;
  int jobs = 1;
  std::string pooled_label = "ALL";
  bool no_pooled = false;
  std::string report_name;
  OutputOptions output;
};

struct FitTask {
  dgbfit::StratumDataset dataset;                 // units path
  std::optional<dgbfit::RankSizeSeries> series;   // series path
};

struct TaskOutcome {
  std::optional<dgbfit::FitRow> row;
  std::optional<dgbfit::ExclusionRow> exclusion;
  std::vector<std::string> warnings;
  std::exception_ptr error;
};

TaskOutcome run_fit_task(const FitTask& task, const dgbfit::Indicator& ind,
                         const dgbfit::FitConfig& config) {
  TaskOutcome outcome;
  try {
    dgbfit::RankSizeSeries series;
    if (task.series) {
      series = *task.series;
    } else {
      if (!task.dataset.included) {
        outcome.exclusion = dgbfit::ExclusionRow{
            task.dataset.stratum_id,
            static_cast<int>(task.dataset.units.size()),
            task.dataset.exclusion_reason};
        return outcome;
      }
      series = dgbfit::build_series(task.dataset, ind, &outcome.warnings);
    }

    dgbfit::FitRow row;
    row.stratum = series.stratum_id;
    row.indicator = series.indicator.label();
    row.year = series.year;
    row.n_units = series.size();
    try {
      const dgbfit::FitResult fit = dgbfit::fit_mle(series, config);
      row.a = fit.params.a();
      row.b = fit.params.b();
      row.ks = fit.ks;
      row.entropy = fit.entropy;
      row.up = fit.up;
      row.log_likelihood = fit.log_likelihood;
      row.converged = fit.converged;
      row.iterations = fit.iterations;
      row.restarts = fit.restarts_used;
    } catch (const dgbfit::NonConvergenceError& e) {
      const dgbfit::FitResult& best = e.best();
      row.a = best.params.a();
      row.b = best.params.b();
      row.ks = best.ks;
      row.entropy = best.entropy;
      row.up = best.up;
      row.log_likelihood = best.log_likelihood;
      row.converged = false;
      row.iterations = best.iterations;
      row.restarts = best.restarts_used;
      outcome.warnings.push_back(e.what());
    }
    outcome.row = std::move(row);
  } catch (const dgbfit::StratumTooSmallError& e) {
    outcome.exclusion = dgbfit::ExclusionRow{
        e.stratum_id(), e.n_units(),
        "fewer than " + std::to_string(e.min_units()) + " units"};
  } catch (const dgbfit::SeriesValidationError& e) {
    const std::string id =
        task.series ? task.series->stratum_id : task.dataset.stratum_id;
    const int n = task.series ? task.series->size()
                              : static_cast<int>(task.dataset.units.size());
    outcome.exclusion = dgbfit::ExclusionRow{id, n, e.what()};
  } catch (...) {
    outcome.error = std::current_exception();
  }
  return outcome;
}

int cmd_fit(const FitCmdOptions& opt) {
  const dgbfit::Indicator indicator = dgbfit::Indicator::parse(opt.indicator);

  dgbfit::FitConfig config;
  config.min_units = opt.min_units;

  std::vector<FitTask> tasks;
  int year = opt.year.value_or(0);
  std::string report_indicator = indicator.label();

  if (file_has_series_header(opt.input)) {
    dgbfit::LoadReport load;
    auto series_list = dgbfit::load_series_csv(opt.input, &load);
    print_load_summary(load);
    std::erase_if(series_list, [&](const dgbfit::RankSizeSeries& s) {
      return opt.year && s.year != *opt.year;
    });
    if (series_list.empty()) {
      std::cerr << "error: no series to fit\n";
      return kExitValidation;
    }
    if (!opt.year) {
      year = series_list.front().year;
    }
    // series files carry their own indicator labels
    report_indicator = series_list.front().indicator.label();
    for (const auto& s : series_list) {
      if (s.indicator.label() != report_indicator) {
        report_indicator = "mixed";
        break;
      }
    }
    for (auto& s : series_list) {
      FitTask task;
      task.series = std::move(s);
      tasks.push_back(std::move(task));
    }
  } else {
    if (indicator.kind == dgbfit::IndicatorKind::custom &&
        indicator.custom_column.empty()) {
      std::cerr << "error: custom indicator needs a column "
                   "(use custom:<column>)\n";
      return kExitValidation;
    }
    dgbfit::LoadReport load;
    const auto records = dgbfit::load_units_csv(opt.input, &load);
    print_load_summary(load);
    if (records.empty()) {
      std::cerr << "error: no usable rows in '" << opt.input << "'\n";
      return kExitValidation;
    }
    if (!opt.year) {
      std::set<int> years;
      for (const auto& r : records) years.insert(r.year);
      if (years.size() != 1) {
        std::cerr << "error: input spans " << years.size()
                  << " years; pick one with --year\n";
        return kExitValidation;
      }
      year = *years.begin();
    }
    if (!opt.no_pooled) {
      FitTask pooled;
      pooled.dataset =
          dgbfit::pool_all(records, year, opt.pooled_label, opt.min_units);
      tasks.push_back(std::move(pooled));
    }
    for (auto& ds : dgbfit::group_by_state(records, year, opt.min_units)) {
      FitTask task;
      task.dataset = std::move(ds);
      tasks.push_back(std::move(task));
    }
  }

  // strata fit in parallel; assembly is by task index so output ordering
  // (and bytes) never depends on --jobs
  std::vector<TaskOutcome> outcomes(tasks.size());
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      outcomes[i] = run_fit_task(tasks[i], indicator, config);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), tasks.size());
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < tasks.size();
             i = next.fetch_add(1)) {
          outcomes[i] = run_fit_task(tasks[i], indicator, config);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  dgbfit::FitReport report;
  report.indicator = report_indicator;
  report.year = year;
  bool any_nonconverged = false;
  for (auto& outcome : outcomes) {
    if (outcome.error) std::rethrow_exception(outcome.error);
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    if (outcome.row) {
      any_nonconverged = any_nonconverged || !outcome.row->converged;
      report.rows.push_back(std::move(*outcome.row));
    }
    if (outcome.exclusion) {
      report.exclusions.push_back(std::move(*outcome.exclusion));
    }
  }
  if (report.rows.empty()) {
    std::cerr << "error: no includable stratum (all "
              << report.exclusions.size() << " excluded)\n";
    return kExitValidation;
  }

  std::filesystem::create_directories(opt.output.out_dir);
  const std::string base =
      opt.report_name.empty()
          ? "fit_" + sanitize(report_indicator) + "_" + std::to_string(year)
          : opt.report_name;
  const std::filesystem::path dir(opt.output.out_dir);
  if (opt.output.csv()) {
    dgbfit::write_fit_report_csv(dir / (base + ".csv"), report);
    std::cout << "wrote " << (dir / (base + ".csv")).string() << "\n";
    if (!report.exclusions.empty()) {
      dgbfit::write_fit_exclusions_csv(dir / (base + "_exclusions.csv"),
                                       report);
      std::cout << "wrote " << (dir / (base + "_exclusions.csv")).string()
                << "\n";
    }
  }
  if (opt.output.json()) {
    dgbfit::write_fit_report_json(dir / (base + ".json"), report);
    std::cout << "wrote " << (dir / (base + ".json")).string() << "\n";
  }
  std::cout << "fitted " << report.rows.size() << " strata, excluded "
            << report.exclusions.size() << "\n";
  return any_nonconverged ? kExitNonConvergence : kExitOk;
}

// ---------------------------------------------------------------------------
// correlate

struct CorrelateCmdOptions {
  std::vector<std::string> inputs;
  std::optional<int> year;
  OutputOptions output;
};

int cmd_correlate(const CorrelateCmdOptions& opt) {
  std::vector<dgbfit::FitReport> reports;
  reports.reserve(opt.inputs.size());
  for (const auto& path : opt.inputs) {
    reports.push_back(dgbfit::read_fit_report_json(path));
  }
  int year = 0;
  if (opt.year) {
    year = *opt.year;
    for (const auto& r : reports) {
      if (r.year != year) {
        std::cerr << "error: report year " << r.year << " does not match --year "
                  << year << "\n";
        return kExitValidation;
      }
    }
  } else {
    std::set<int> years;
    for (const auto& r : reports) years.insert(r.year);
    if (years.size() != 1) {
      std::cerr << "error: reports span several years; pick one with --year\n";
      return kExitValidation;
    }
    year = *years.begin();
  }

  const auto fits = dgbfit::collect_fit_points(reports);
  const auto report = dgbfit::correlate_fits(fits, year);

  std::filesystem::create_directories(opt.output.out_dir);
  const std::filesystem::path dir(opt.output.out_dir);
  const std::string base = "correlations_" + std::to_string(year);
  if (opt.output.csv()) {
    dgbfit::write_correlation_csv(dir / (base + ".csv"), report);
    std::cout << "wrote " << (dir / (base + ".csv")).string() << "\n";
  }
  if (opt.output.json()) {
    dgbfit::write_correlation_json(dir / (base + ".json"), report);
    std::cout << "wrote " << (dir / (base + ".json")).string() << "\n";
  }
  int significant = 0;
  for (const auto& e : report.entries) significant += e.significant() ? 1 : 0;
  std::cout << report.entries.size() << " variable pairs over "
            << report.n_strata << " strata, " << significant
            << " significant at 95%\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

struct CompareCmdOptions {
  std::string from;
  std::string to;
  OutputOptions output;
};

int cmd_compare(const CompareCmdOptions& opt) {
  const auto report_from = dgbfit::read_fit_report_json(opt.from);
  const auto report_to = dgbfit::read_fit_report_json(opt.to);
  const auto deltas = dgbfit::compare_reports(report_from, report_to);

  std::filesystem::create_directories(opt.output.out_dir);
  const std::filesystem::path dir(opt.output.out_dir);
  const std::string base = "compare_" + std::to_string(report_from.year) +
                           "_" + std::to_string(report_to.year);
  if (opt.output.csv()) {
    dgbfit::write_delta_csv(dir / (base + ".csv"), deltas);
    std::cout << "wrote " << (dir / (base + ".csv")).string() << "\n";
  }
  if (opt.output.json()) {
    dgbfit::write_delta_json(dir / (base + ".json"), deltas);
    std::cout << "wrote " << (dir / (base + ".json")).string() << "\n";
  }
  std::cout << deltas.size() << " shared strata; largest |delta UP| = "
            << std::abs(deltas.front().delta_up) << " (" << deltas.front().stratum
            << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateCmdOptions {
  double a = 0.0;
  double b = 0.0;
  int n = 0;
  std::size_t draws = 1000000;
  std::uint64_t seed = 1;
  std::string stratum = "synthetic";
  int year = 0;
  std::string output_path;
  OutputOptions output;
};

int cmd_simulate(const SimulateCmdOptions& opt) {
  const auto series = dgbfit::sampled_series(opt.a, opt.b, opt.n, opt.draws,
                                             opt.seed, opt.stratum, opt.year);
  std::filesystem::create_directories(opt.output.out_dir);
  const std::filesystem::path path =
      opt.output_path.empty()
          ? std::filesystem::path(opt.output.out_dir) / "simulated_series.csv"
          : std::filesystem::path(opt.output_path);
  dgbfit::write_series_csv(path, {series});
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Fit the two-parameter discrete generalized beta rank-order "
      "distribution to stratified rank-size data; report KS fit quality and "
      "the entropy-based uncertainty percentage (UP)."};
  app.require_subcommand(1);

  FitCmdOptions fit_opt;
  auto* fit = app.add_subcommand(
      "fit", "Fit every stratum in a units or series CSV");
  fit->add_option("--input", fit_opt.input, "Input CSV")
      ->required();
  fit->add_option("--indicator", fit_opt.indicator,
                  "population | lr | wpr | sr-lr | sr-wpr | custom:<column>")
      ->capture_default_str();
  fit->add_option("--year", fit_opt.year, "Census year to select");
  fit->add_option("--min-units", fit_opt.min_units,
                  "Exclude strata with fewer units")
      ->capture_default_str();
  fit->add_option("--jobs", fit_opt.jobs, "Fit strata in parallel")
      ->capture_default_str();
  fit->add_option("--pooled-label", fit_opt.pooled_label,
                  "Stratum id for the pooled all-units row")
      ->capture_default_str();
  fit->add_flag("--no-pooled", fit_opt.no_pooled,
                "Skip the pooled all-units row");
  fit->add_option("--report-name", fit_opt.report_name,
                  "Base name for report files");
  add_output_options(fit, &fit_opt.output);

  CorrelateCmdOptions corr_opt;
  auto* correlate = app.add_subcommand(
      "correlate", "Correlate fitted parameters and UP across indicators");
  correlate
      ->add_option("--inputs", corr_opt.inputs,
                   "Fit report JSON files (one per indicator)")
      ->required()
      ->expected(1, -1);
  correlate->add_option("--year", corr_opt.year, "Expected report year");
  add_output_options(correlate, &corr_opt.output);

  CompareCmdOptions comp_opt;
  auto* compare = app.add_subcommand(
      "compare", "Year-over-year deltas between two fit reports");
  compare->add_option("--from", comp_opt.from, "Earlier fit report JSON")
      ->required();
  compare->add_option("--to", comp_opt.to, "Later fit report JSON")
      ->required();
  add_output_options(compare, &comp_opt.output);

  SimulateCmdOptions sim_opt;
  auto* simulate = app.add_subcommand(
      "simulate", "Draw a synthetic rank-size series");
  simulate->add_option("--a", sim_opt.a, "Exponent a")->required();
  simulate->add_option("--b", sim_opt.b, "Exponent b")->required();
  simulate->add_option("--n", sim_opt.n, "Number of ranks")->required();
  simulate->add_option("--draws", sim_opt.draws, "Sample size")
      ->capture_default_str();
  simulate->add_option("--seed", sim_opt.seed, "RNG seed")
      ->capture_default_str();
  simulate->add_option("--stratum", sim_opt.stratum, "Stratum label")
      ->capture_default_str();
  simulate->add_option("--year", sim_opt.year, "Year label")
      ->capture_default_str();
  simulate->add_option("--output", sim_opt.output_path,
                       "Output CSV (default <out-dir>/simulated_series.csv)");
  add_output_options(simulate, &sim_opt.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_opt);
    if (correlate->parsed()) return cmd_correlate(corr_opt);
    if (compare->parsed()) return cmd_compare(comp_opt);
    if (simulate->parsed()) return cmd_simulate(sim_opt);
  } catch (const dgbfit::FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dgbfit::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dgbfit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
