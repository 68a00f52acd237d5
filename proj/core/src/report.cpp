#include "dgbfit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "dgbfit/errors.hpp"

#include "csv_util.hpp"

#include "json.hpp"

namespace dgbfit {

namespace {

using detail::csv_escape;
using json = nlohmann::ordered_json;

std::string fixed(double v, int precision) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw FileError("cannot write '" + path.string() + "'");
  }
  out << text;
  if (!out) {
    throw FileError("failed while writing '" + path.string() + "'");
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileError("cannot open '" + path.string() + "'");
  }
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " +
                      e.what());
  }
  return doc;
}

}  // namespace

void write_fit_report_csv(const std::filesystem::path& path,
                          const FitReport& report) {
  std::string text = "stratum,indicator,year,n,a,b,ks,entropy,up,status\n";
  for (const auto& row : report.rows) {
    text += csv_escape(row.stratum) + ',' + csv_escape(row.indicator) + ',' +
            std::to_string(row.year) + ',' + std::to_string(row.n_units) +
            ',' + fixed(row.a, 3) + ',' + fixed(row.b, 3) + ',' +
            fixed(row.ks, 3) + ',' + fixed(row.entropy, 4) + ',' +
            fixed(row.up, 2) + ',' +
            (row.converged ? "ok" : "non-converged") + '\n';
  }
  write_text(path, text);
}

void write_fit_exclusions_csv(const std::filesystem::path& path,
                              const FitReport& report) {
  std::string text = "stratum,n,reason\n";
  for (const auto& row : report.exclusions) {
    text += csv_escape(row.stratum) + ',' + std::to_string(row.n_units) +
            ',' + csv_escape(row.reason) + '\n';
  }
  write_text(path, text);
}

void write_fit_report_json(const std::filesystem::path& path,
                           const FitReport& report) {
  json doc;
  doc["type"] = "fit_report";
  doc["indicator"] = report.indicator;
  doc["year"] = report.year;
  doc["results"] = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["stratum"] = row.stratum;
    r["indicator"] = row.indicator;
    r["year"] = row.year;
    r["n"] = row.n_units;
    r["a"] = row.a;
    r["b"] = row.b;
    r["ks"] = row.ks;
    r["entropy"] = row.entropy;
    r["up"] = row.up;
    r["log_likelihood"] = row.log_likelihood;
    r["converged"] = row.converged;
    r["iterations"] = row.iterations;
    r["restarts"] = row.restarts;
    doc["results"].push_back(std::move(r));
  }
  doc["exclusions"] = json::array();
  for (const auto& row : report.exclusions) {
    json r;
    r["stratum"] = row.stratum;
    r["n"] = row.n_units;
    r["reason"] = row.reason;
    doc["exclusions"].push_back(std::move(r));
  }
  write_text(path, doc.dump(2) + "\n");
}

FitReport read_fit_report_json(const std::filesystem::path& path) {
  const json doc = load_json(path);
  FitReport report;
  try {
    if (doc.at("type").get<std::string>() != "fit_report") {
      throw FormatError("'" + path.string() + "' is not a fit report");
    }
    report.indicator = doc.at("indicator").get<std::string>();
    report.year = doc.at("year").get<int>();
    for (const auto& r : doc.at("results")) {
      FitRow row;
      row.stratum = r.at("stratum").get<std::string>();
      row.indicator = r.at("indicator").get<std::string>();
      row.year = r.at("year").get<int>();
      row.n_units = r.at("n").get<int>();
      row.a = r.at("a").get<double>();
      row.b = r.at("b").get<double>();
      row.ks = r.at("ks").get<double>();
      row.entropy = r.at("entropy").get<double>();
      row.up = r.at("up").is_null() ? std::nan("") : r.at("up").get<double>();
      row.log_likelihood = r.at("log_likelihood").get<double>();
      row.converged = r.at("converged").get<bool>();
      row.iterations = r.at("iterations").get<int>();
      row.restarts = r.at("restarts").get<int>();
      report.rows.push_back(std::move(row));
    }
    for (const auto& r : doc.at("exclusions")) {
      ExclusionRow row;
      row.stratum = r.at("stratum").get<std::string>();
      row.n_units = r.at("n").get<int>();
      row.reason = r.at("reason").get<std::string>();
      report.exclusions.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw FormatError("'" + path.string() + "' is missing fit report fields: " +
                      e.what());
  }
  return report;
}

std::vector<DeltaRow> compare_reports(const FitReport& from,
                                      const FitReport& to) {
  std::map<std::pair<std::string, std::string>, const FitRow*> earlier;
  for (const auto& row : from.rows) {
    earlier[{row.stratum, row.indicator}] = &row;
  }
  std::vector<DeltaRow> deltas;
  for (const auto& row : to.rows) {
    auto it = earlier.find({row.stratum, row.indicator});
    if (it == earlier.end()) continue;
    const FitRow& old = *it->second;
    DeltaRow d;
    d.stratum = row.stratum;
    d.indicator = row.indicator;
    d.year_from = old.year;
    d.year_to = row.year;
    d.a_from = old.a;
    d.a_to = row.a;
    d.delta_a = row.a - old.a;
    d.b_from = old.b;
    d.b_to = row.b;
    d.delta_b = row.b - old.b;
    d.up_from = old.up;
    d.up_to = row.up;
    d.delta_up = row.up - old.up;
    deltas.push_back(std::move(d));
  }
  if (deltas.empty()) {
    throw ComparisonError("the two reports share no (stratum, indicator)");
  }
  std::sort(deltas.begin(), deltas.end(),
            [](const DeltaRow& x, const DeltaRow& y) {
              const double ax = std::abs(x.delta_up);
              const double ay = std::abs(y.delta_up);
              if (ax != ay) return ax > ay;
              if (x.stratum != y.stratum) return x.stratum < y.stratum;
              return x.indicator < y.indicator;
            });
  return deltas;
}

void write_delta_csv(const std::filesystem::path& path,
                     const std::vector<DeltaRow>& rows) {
  std::string text =
      "stratum,indicator,year_from,year_to,a_from,a_to,delta_a,"
      "b_from,b_to,delta_b,up_from,up_to,delta_up\n";
  for (const auto& d : rows) {
    text += csv_escape(d.stratum) + ',' + csv_escape(d.indicator) + ',' +
            std::to_string(d.year_from) + ',' + std::to_string(d.year_to) +
            ',' + fixed(d.a_from, 3) + ',' + fixed(d.a_to, 3) + ',' +
            fixed(d.delta_a, 3) + ',' + fixed(d.b_from, 3) + ',' +
            fixed(d.b_to, 3) + ',' + fixed(d.delta_b, 3) + ',' +
            fixed(d.up_from, 2) + ',' + fixed(d.up_to, 2) + ',' +
            fixed(d.delta_up, 2) + '\n';
  }
  write_text(path, text);
}

void write_delta_json(const std::filesystem::path& path,
                      const std::vector<DeltaRow>& rows) {
  json doc;
  doc["type"] = "compare_report";
  doc["results"] = json::array();
  for (const auto& d : rows) {
    json r;
    r["stratum"] = d.stratum;
    r["indicator"] = d.indicator;
    r["year_from"] = d.year_from;
    r["year_to"] = d.year_to;
    r["a_from"] = d.a_from;
    r["a_to"] = d.a_to;
    r["delta_a"] = d.delta_a;
    r["b_from"] = d.b_from;
    r["b_to"] = d.b_to;
    r["delta_b"] = d.delta_b;
    r["up_from"] = d.up_from;
    r["up_to"] = d.up_to;
    r["delta_up"] = d.delta_up;
    doc["results"].push_back(std::move(r));
  }
  write_text(path, doc.dump(2) + "\n");
}

std::vector<StratumFit> collect_fit_points(
    const std::vector<FitReport>& reports) {
  std::set<std::string> used_labels;
  std::vector<StratumFit> fits;
  for (const auto& report : reports) {
    // one label per report; disambiguate repeats so self-correlation works
    std::set<std::string> labels_in_report;
    for (const auto& row : report.rows) labels_in_report.insert(row.indicator);

    std::map<std::string, std::string> renamed;
    for (const auto& label : labels_in_report) {
      std::string candidate = label;
      int suffix = 2;
      while (used_labels.count(candidate) > 0) {
        candidate = label + "#" + std::to_string(suffix++);
      }
      used_labels.insert(candidate);
      renamed[label] = candidate;
    }
    for (const auto& row : report.rows) {
      fits.push_back(
          {row.stratum, renamed[row.indicator], row.a, row.b, row.up});
    }
  }
  return fits;
}

void write_correlation_csv(const std::filesystem::path& path,
                           const CorrelationReport& report) {
  std::string text = "left,right,statistic,r,significant_95,slope,intercept\n";
  for (const auto& e : report.entries) {
    const std::string slope = e.significant() ? fixed(e.slope, 6) : "";
    const std::string intercept =
        e.significant() ? fixed(e.intercept, 6) : "";
    text += csv_escape(e.left) + ',' + csv_escape(e.right) + ",pearson," +
            fixed(e.pearson, 4) + ',' +
            (e.pearson_significant ? "true" : "false") + ',' + slope + ',' +
            intercept + '\n';
    text += csv_escape(e.left) + ',' + csv_escape(e.right) + ",spearman," +
            fixed(e.spearman, 4) + ',' +
            (e.spearman_significant ? "true" : "false") + ',' + slope + ',' +
            intercept + '\n';
  }
  write_text(path, text);
}

void write_correlation_json(const std::filesystem::path& path,
                            const CorrelationReport& report) {
  json doc;
  doc["type"] = "correlation_report";
  doc["year"] = report.year;
  doc["n_strata"] = report.n_strata;
  doc["strata"] = report.strata;
  doc["pairs"] = json::array();
  for (const auto& e : report.entries) {
    json r;
    r["left"] = e.left;
    r["right"] = e.right;
    r["pearson"] = e.pearson;
    r["pearson_significant"] = e.pearson_significant;
    r["spearman"] = e.spearman;
    r["spearman_significant"] = e.spearman_significant;
    r["significant_95"] = e.significant();
    if (e.significant()) {
      r["slope"] = e.slope;
      r["intercept"] = e.intercept;
    }
    doc["pairs"].push_back(std::move(r));
  }
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace dgbfit
