#include "dgbfit/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dgbfit/errors.hpp"

#include "csv_util.hpp"

namespace dgbfit {

namespace {

using detail::csv_escape;
using detail::split_csv_line;
using detail::trim;

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw FileError("cannot open '" + path.string() + "'");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool parse_int64(const std::string& text, std::int64_t* out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), *out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_int(const std::string& text, int* out) {
  std::int64_t v = 0;
  if (!parse_int64(text, &v)) return false;
  *out = static_cast<int>(v);
  return true;
}

bool parse_double(const std::string& text, double* out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (errno != 0 || end != t.c_str() + t.size()) return false;
  *out = v;
  return true;
}

struct HeaderIndex {
  std::map<std::string, std::size_t> columns;

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  }
};

HeaderIndex index_header(const std::string& header_line) {
  HeaderIndex idx;
  const auto names = split_csv_line(header_line);
  for (std::size_t i = 0; i < names.size(); ++i) {
    idx.columns[to_lower(trim(names[i]))] = i;
  }
  return idx;
}

const char* const kUnitColumns[] = {"state",  "district", "year",
                                    "pop_t",  "pop_m",    "pop_f",
                                    "lit_t",  "lit_m",    "lit_f",
                                    "work_t", "work_m",   "work_f"};

bool is_unit_schema_column(const std::string& name) {
  for (const char* col : kUnitColumns) {
    if (name == col) return true;
  }
  return false;
}

// Reads an optional count column; empty/absent -> nullopt, junk -> error.
bool read_count(const std::vector<std::string>& fields, const HeaderIndex& idx,
                const std::string& column, std::optional<std::int64_t>* out,
                std::string* error) {
  const auto pos = idx.find(column);
  *out = std::nullopt;
  if (!pos || *pos >= fields.size()) return true;
  const std::string text = trim(fields[*pos]);
  if (text.empty()) return true;
  std::int64_t v = 0;
  if (!parse_int64(text, &v)) {
    *error = "column '" + column + "' is not an integer: '" + text + "'";
    return false;
  }
  if (v < 0) {
    *error = "column '" + column + "' is negative";
    return false;
  }
  *out = v;
  return true;
}

bool validate_triple(const std::string& name, const CountTriple& triple,
                     std::string* error) {
  if (triple.male && triple.female && triple.total &&
      *triple.male + *triple.female != *triple.total) {
    *error = name + " male + female (" +
             std::to_string(*triple.male + *triple.female) +
             ") does not equal the total (" + std::to_string(*triple.total) +
             ")";
    return false;
  }
  return true;
}

bool validate_bounded(const std::string& name,
                      const std::optional<std::int64_t>& part,
                      const std::optional<std::int64_t>& whole,
                      std::string* error) {
  if (part && whole && *part > *whole) {
    *error = name + " (" + std::to_string(*part) + ") exceeds population (" +
             std::to_string(*whole) + ")";
    return false;
  }
  return true;
}

std::string format_size(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<UnitRecord> load_units_csv(const std::filesystem::path& path,
                                       LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  const auto lines = read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) {
    rep.warnings.push_back("'" + path.string() + "' contains no data");
    return {};
  }

  const HeaderIndex idx = index_header(lines[first]);
  for (const char* required : {"state", "district", "year", "pop_t"}) {
    if (!idx.find(required)) {
      throw FormatError("'" + path.string() + "': header is missing column '" +
                        std::string(required) + "'");
    }
  }
  std::vector<std::string> extra_columns;
  for (const auto& [name, pos] : idx.columns) {
    (void)pos;
    if (!is_unit_schema_column(name)) extra_columns.push_back(name);
  }

  std::vector<UnitRecord> records;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    ++rep.rows_read;
    const std::size_t line_no = i + 1;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != idx.columns.size()) {
      rep.rejects.push_back({line_no,
                             "expected " + std::to_string(idx.columns.size()) +
                                 " fields, found " +
                                 std::to_string(fields.size())});
      continue;
    }

    UnitRecord rec;
    rec.state = trim(fields[*idx.find("state")]);
    rec.district = trim(fields[*idx.find("district")]);
    if (rec.state.empty() || rec.district.empty()) {
      rep.rejects.push_back({line_no, "state or district is empty"});
      continue;
    }
    if (!parse_int(fields[*idx.find("year")], &rec.year)) {
      rep.rejects.push_back({line_no, "year is not an integer"});
      continue;
    }

    std::string error;
    bool ok = read_count(fields, idx, "pop_t", &rec.population.total, &error) &&
              read_count(fields, idx, "pop_m", &rec.population.male, &error) &&
              read_count(fields, idx, "pop_f", &rec.population.female, &error) &&
              read_count(fields, idx, "lit_t", &rec.literate.total, &error) &&
              read_count(fields, idx, "lit_m", &rec.literate.male, &error) &&
              read_count(fields, idx, "lit_f", &rec.literate.female, &error) &&
              read_count(fields, idx, "work_t", &rec.workers.total, &error) &&
              read_count(fields, idx, "work_m", &rec.workers.male, &error) &&
              read_count(fields, idx, "work_f", &rec.workers.female, &error);
    if (ok && !rec.population.total) {
      error = "pop_t is empty";
      ok = false;
    }
    ok = ok && validate_triple("population", rec.population, &error) &&
         validate_triple("literate", rec.literate, &error) &&
         validate_triple("workers", rec.workers, &error) &&
         validate_bounded("literate total", rec.literate.total,
                          rec.population.total, &error) &&
         validate_bounded("workers total", rec.workers.total,
                          rec.population.total, &error) &&
         validate_bounded("literate male", rec.literate.male,
                          rec.population.male, &error) &&
         validate_bounded("literate female", rec.literate.female,
                          rec.population.female, &error) &&
         validate_bounded("workers male", rec.workers.male,
                          rec.population.male, &error) &&
         validate_bounded("workers female", rec.workers.female,
                          rec.population.female, &error);
    if (!ok) {
      rep.rejects.push_back({line_no, error});
      continue;
    }

    for (const auto& col : extra_columns) {
      const auto pos = idx.find(col);
      if (!pos || *pos >= fields.size()) continue;
      double v = 0.0;
      if (parse_double(fields[*pos], &v)) rec.extra[col] = v;
    }

    records.push_back(std::move(rec));
    ++rep.rows_accepted;
  }
  if (records.empty() && rep.rows_read == 0) {
    rep.warnings.push_back("'" + path.string() + "' has a header but no rows");
  }
  return records;
}

std::vector<RankSizeSeries> load_series_csv(const std::filesystem::path& path,
                                            LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;

  const auto lines = read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) {
    rep.warnings.push_back("'" + path.string() + "' contains no data");
    return {};
  }

  const HeaderIndex idx = index_header(lines[first]);
  for (const char* required :
       {"stratum", "indicator", "year", "unit_id", "rank", "size"}) {
    if (!idx.find(required)) {
      throw FormatError("'" + path.string() + "': header is missing column '" +
                        std::string(required) + "'");
    }
  }

  struct Key {
    std::string stratum, indicator;
    int year;
    bool operator<(const Key& o) const {
      return std::tie(stratum, indicator, year) <
             std::tie(o.stratum, o.indicator, o.year);
    }
  };
  std::vector<Key> order;
  std::map<Key, std::vector<SeriesEntry>> groups;

  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    ++rep.rows_read;
    const std::size_t line_no = i + 1;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != idx.columns.size()) {
      rep.rejects.push_back({line_no, "wrong field count"});
      continue;
    }
    Key key{trim(fields[*idx.find("stratum")]),
            to_lower(trim(fields[*idx.find("indicator")])), 0};
    SeriesEntry entry;
    entry.unit_id = trim(fields[*idx.find("unit_id")]);
    if (!parse_int(fields[*idx.find("year")], &key.year)) {
      rep.rejects.push_back({line_no, "year is not an integer"});
      continue;
    }
    if (!parse_int(fields[*idx.find("rank")], &entry.rank) || entry.rank < 1) {
      rep.rejects.push_back({line_no, "rank is not a positive integer"});
      continue;
    }
    if (!parse_double(fields[*idx.find("size")], &entry.size) ||
        !std::isfinite(entry.size) || entry.size < 0.0) {
      rep.rejects.push_back({line_no, "size is not a non-negative number"});
      continue;
    }
    if (groups.find(key) == groups.end()) order.push_back(key);
    groups[key].push_back(std::move(entry));
    ++rep.rows_accepted;
  }

  std::vector<RankSizeSeries> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    RankSizeSeries series;
    series.stratum_id = key.stratum;
    series.indicator = Indicator::parse(key.indicator);
    series.year = key.year;
    series.entries = std::move(groups[key]);
    std::sort(series.entries.begin(), series.entries.end(),
              [](const SeriesEntry& x, const SeriesEntry& y) {
                return x.rank < y.rank;
              });
    series.validate();
    out.push_back(std::move(series));
  }
  return out;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<RankSizeSeries>& series_list) {
  std::ofstream out(path);
  if (!out) {
    throw FileError("cannot write '" + path.string() + "'");
  }
  out << "stratum,indicator,year,unit_id,rank,size\n";
  for (const auto& series : series_list) {
    for (const auto& e : series.entries) {
      out << csv_escape(series.stratum_id) << ','
          << csv_escape(series.indicator.label()) << ',' << series.year << ','
          << csv_escape(e.unit_id) << ',' << e.rank << ','
          << format_size(e.size) << '\n';
    }
  }
  if (!out) {
    throw FileError("failed while writing '" + path.string() + "'");
  }
}

std::optional<double> try_derive_indicator(const UnitRecord& record,
                                           const Indicator& indicator,
                                           std::string* why) {
  auto fail = [&](const std::string& reason) -> std::optional<double> {
    if (why) *why = reason;
    return std::nullopt;
  };
  auto rate = [&](const std::optional<std::int64_t>& numerator,
                  const char* num_name,
                  const std::optional<std::int64_t>& denominator,
                  const char* den_name) -> std::optional<double> {
    if (!numerator) return fail(std::string(num_name) + " missing");
    if (!denominator) return fail(std::string(den_name) + " missing");
    if (*denominator == 0) return fail(std::string(den_name) + " is zero");
    return static_cast<double>(*numerator) /
           static_cast<double>(*denominator) * 100.0;
  };

  switch (indicator.kind) {
    case IndicatorKind::population:
      if (!record.population.total) return fail("pop_t missing");
      return static_cast<double>(*record.population.total);
    case IndicatorKind::literacy_rate:
      return rate(record.literate.total, "lit_t", record.population.total,
                  "pop_t");
    case IndicatorKind::work_participation_rate:
      return rate(record.workers.total, "work_t", record.population.total,
                  "pop_t");
    case IndicatorKind::sex_ratio_literacy:
      return rate(record.literate.female, "lit_f", record.literate.male,
                  "lit_m");
    case IndicatorKind::sex_ratio_work:
      return rate(record.workers.female, "work_f", record.workers.male,
                  "work_m");
    case IndicatorKind::custom: {
      if (indicator.custom_column.empty()) {
        return fail("custom indicator needs a column name");
      }
      auto it = record.extra.find(indicator.custom_column);
      if (it == record.extra.end()) {
        return fail("column '" + indicator.custom_column + "' missing");
      }
      if (!(it->second >= 0.0)) {
        return fail("column '" + indicator.custom_column + "' is negative");
      }
      return it->second;
    }
  }
  return fail("unknown indicator");
}

double derive_indicator(const UnitRecord& record, const Indicator& indicator) {
  std::string why;
  const auto value = try_derive_indicator(record, indicator, &why);
  if (!value) {
    throw IndicatorUndefinedError("indicator " + indicator.label() +
                                  " undefined for '" + record.state + "/" +
                                  record.district + "': " + why);
  }
  return *value;
}

std::vector<StratumDataset> group_by_state(
    const std::vector<UnitRecord>& records, int year, int min_units) {
  std::map<std::string, std::vector<UnitRecord>> by_state;
  for (const auto& rec : records) {
    if (rec.year == year) by_state[rec.state].push_back(rec);
  }
  std::vector<StratumDataset> strata;
  strata.reserve(by_state.size());
  for (auto& [state, units] : by_state) {
    StratumDataset ds;
    ds.stratum_id = state;
    ds.year = year;
    ds.units = std::move(units);
    if (static_cast<int>(ds.units.size()) < min_units) {
      ds.included = false;
      ds.exclusion_reason =
          "fewer than " + std::to_string(min_units) + " units";
    }
    strata.push_back(std::move(ds));
  }
  return strata;
}

StratumDataset pool_all(const std::vector<UnitRecord>& records, int year,
                        std::string stratum_id, int min_units) {
  StratumDataset ds;
  ds.stratum_id = std::move(stratum_id);
  ds.year = year;
  for (const auto& rec : records) {
    if (rec.year == year) ds.units.push_back(rec);
  }
  if (static_cast<int>(ds.units.size()) < min_units) {
    ds.included = false;
    ds.exclusion_reason = "fewer than " + std::to_string(min_units) + " units";
  }
  return ds;
}

RankSizeSeries build_series(const StratumDataset& dataset,
                            const Indicator& indicator,
                            std::vector<std::string>* warnings) {
  if (!dataset.included) {
    throw ExcludedStratumError("stratum '" + dataset.stratum_id +
                               "' is excluded: " + dataset.exclusion_reason);
  }

  std::set<std::string> states;
  for (const auto& u : dataset.units) states.insert(u.state);
  const bool pooled = states.size() > 1;

  struct Item {
    double value;
    std::string label;
  };
  std::vector<Item> items;
  items.reserve(dataset.units.size());
  for (const auto& unit : dataset.units) {
    const std::string label =
        pooled ? unit.state + "/" + unit.district : unit.district;
    std::string why;
    const auto value = try_derive_indicator(unit, indicator, &why);
    if (!value) {
      if (warnings) {
        warnings->push_back(dataset.stratum_id + ": unit '" + label +
                            "' dropped: " + why);
      }
      continue;
    }
    items.push_back({*value, label});
  }
  if (items.empty()) {
    throw SeriesValidationError("stratum '" + dataset.stratum_id +
                                "' has no units with a defined " +
                                indicator.label() + " value");
  }

  std::stable_sort(items.begin(), items.end(),
                   [](const Item& x, const Item& y) {
                     if (x.value != y.value) return x.value > y.value;
                     return x.label < y.label;
                   });

  RankSizeSeries series;
  series.stratum_id = dataset.stratum_id;
  series.indicator = indicator;
  series.year = dataset.year;
  series.entries.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    series.entries.push_back(
        {items[i].label, static_cast<int>(i) + 1, items[i].value});
  }
  series.validate();
  return series;
}

}  // namespace dgbfit
