#include <set>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <map>

#include "dgbfit/data.hpp"
#include "dgbfit/errors.hpp"

#include "doctest.h"

using namespace dgbfit;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dgbfit-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  fs::path file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p;
  }
};

const char* kUnitsHeader =
    "state,district,year,pop_t,pop_m,pop_f,lit_t,lit_m,lit_f,work_t,work_m,"
    "work_f\n";

UnitRecord make_unit(const std::string& state, const std::string& district,
                     std::int64_t pop, std::int64_t lit, std::int64_t work) {
  UnitRecord u;
  u.state = state;
  u.district = district;
  u.year = 2011;
  u.population.total = pop;
  u.literate.total = lit;
  u.workers.total = work;
  return u;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("indicators derive from raw counts") {
  UnitRecord u = make_unit("S", "D", 100, 50, 0);
  CHECK(derive_indicator(u, Indicator::parse("population")) ==
        doctest::Approx(100.0));
  CHECK(derive_indicator(u, Indicator::parse("lr")) == doctest::Approx(50.0));
  // a zero worker count is a valid zero rate, not an error
  CHECK(derive_indicator(u, Indicator::parse("wpr")) == doctest::Approx(0.0));

  u.literate.male = 1000;
  u.literate.female = 940;
  u.population.total = 2500;
  u.literate.total = 1940;
  CHECK(derive_indicator(u, Indicator::parse("sr-lr")) ==
        doctest::Approx(94.0));
}

TEST_CASE("zero denominators and missing columns are undefined") {
  UnitRecord u = make_unit("S", "D", 0, 0, 0);
  CHECK_THROWS_AS(derive_indicator(u, Indicator::parse("lr")),
                  IndicatorUndefinedError);
  CHECK_THROWS_AS(derive_indicator(u, Indicator::parse("sr-lr")),
                  IndicatorUndefinedError);
  std::string why;
  CHECK_FALSE(try_derive_indicator(u, Indicator::parse("wpr"), &why));
  CHECK(why == "pop_t is zero");

  u.extra["density"] = 42.5;
  CHECK(derive_indicator(u, Indicator::parse("custom:density")) ==
        doctest::Approx(42.5));
  CHECK_THROWS_AS(derive_indicator(u, Indicator::parse("custom:missing")),
                  IndicatorUndefinedError);
}

TEST_CASE("build_series ranks descending with deterministic ties") {
  StratumDataset ds;
  ds.stratum_id = "S";
  ds.year = 2011;
  ds.units = {make_unit("S", "C", 5, 1, 1), make_unit("S", "A", 9, 1, 1),
              make_unit("S", "B", 1, 1, 1)};
  const auto series = build_series(ds, Indicator::parse("population"));
  REQUIRE(series.size() == 3);
  CHECK(series.entries[0].unit_id == "A");
  CHECK(series.entries[0].size == doctest::Approx(9.0));
  CHECK(series.entries[1].unit_id == "C");
  CHECK(series.entries[2].unit_id == "B");
  CHECK(series.rank_ordered());

  StratumDataset tie;
  tie.stratum_id = "S";
  tie.units = {make_unit("S", "B", 7, 1, 1), make_unit("S", "A", 7, 1, 1)};
  const auto tied = build_series(tie, Indicator::parse("population"));
  CHECK(tied.entries[0].unit_id == "A");
  CHECK(tied.entries[0].rank == 1);
  CHECK(tied.entries[1].unit_id == "B");
  CHECK(tied.entries[1].rank == 2);
}

TEST_CASE("build_series drops undefined units with a warning") {
  StratumDataset ds;
  ds.stratum_id = "S";
  ds.units = {make_unit("S", "A", 100, 60, 30), make_unit("S", "B", 0, 0, 0),
              make_unit("S", "C", 200, 80, 90)};
  std::vector<std::string> warnings;
  const auto series = build_series(ds, Indicator::parse("lr"), &warnings);
  CHECK(series.size() == 2);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("'B' dropped") != std::string::npos);
}

TEST_CASE("build_series preserves the multiset of derived values") {
  StratumDataset ds;
  ds.stratum_id = "S";
  ds.units = {make_unit("S", "A", 10, 4, 2), make_unit("S", "B", 40, 4, 2),
              make_unit("S", "C", 10, 4, 2), make_unit("S", "D", 25, 4, 2)};
  const auto series = build_series(ds, Indicator::parse("population"));
  std::multiset<double> derived;
  for (const auto& u : ds.units) {
    derived.insert(derive_indicator(u, Indicator::parse("population")));
  }
  std::multiset<double> in_series;
  for (const auto& e : series.entries) in_series.insert(e.size);
  CHECK(derived == in_series);
}

TEST_CASE("excluded strata refuse to build") {
  StratumDataset ds;
  ds.stratum_id = "tiny";
  ds.included = false;
  ds.exclusion_reason = "fewer than 5 units";
  CHECK_THROWS_AS(build_series(ds, Indicator::parse("population")),
                  ExcludedStratumError);
}

TEST_CASE("group_by_state applies the minimum-unit rule") {
  std::vector<UnitRecord> records;
  for (int i = 0; i < 6; ++i) {
    records.push_back(make_unit("Big", "d" + std::to_string(i), 100 + i, 1, 1));
  }
  for (int i = 0; i < 3; ++i) {
    records.push_back(make_unit("Small", "d" + std::to_string(i), 50 + i, 1, 1));
  }
  records.push_back(make_unit("OtherYear", "d", 10, 1, 1));
  records.back().year = 2001;

  const auto strata = group_by_state(records, 2011, 5);
  REQUIRE(strata.size() == 2);
  CHECK(strata[0].stratum_id == "Big");
  CHECK(strata[0].included);
  CHECK(strata[1].stratum_id == "Small");
  CHECK_FALSE(strata[1].included);
  CHECK(strata[1].exclusion_reason == "fewer than 5 units");

  const auto pooled = pool_all(records, 2011, "ALL", 5);
  CHECK(pooled.stratum_id == "ALL");
  CHECK(pooled.units.size() == 9);
  CHECK(pooled.included);
}

TEST_CASE("pooled series disambiguates repeated district names") {
  std::vector<UnitRecord> records;
  records.push_back(make_unit("X", "Twin", 10, 1, 1));
  records.push_back(make_unit("Y", "Twin", 20, 1, 1));
  records.push_back(make_unit("X", "Solo", 30, 1, 1));
  const auto pooled = pool_all(records, 2011, "ALL", 3);
  const auto series = build_series(pooled, Indicator::parse("population"));
  CHECK(series.entries[0].unit_id == "X/Solo");
  CHECK(series.entries[1].unit_id == "Y/Twin");
  CHECK(series.entries[2].unit_id == "X/Twin");
}

TEST_CASE("load_units_csv accepts well-formed files") {
  TempDir tmp;
  std::string content = kUnitsHeader;
  content += "Alpha,A1,2011,1000,600,400,700,400,300,350,200,150\n";
  content += "Alpha,A2,2011,2000,1100,900,900,500,400,800,500,300\n";
  const auto path = tmp.file("units.csv", content);
  LoadReport report;
  const auto records = load_units_csv(path, &report);
  REQUIRE(records.size() == 2);
  CHECK(report.rows_read == 2);
  CHECK(report.rows_accepted == 2);
  CHECK(report.rejects.empty());
  CHECK(records[0].population.total == 1000);
  CHECK(records[0].literate.male == 400);
}

TEST_CASE("load_units_csv rejects invariant violations row by row") {
  TempDir tmp;
  std::string content = kUnitsHeader;
  content += "Alpha,A1,2011,1000,600,400,700,400,300,350,200,150\n";
  content += "Alpha,Bad1,2011,1000,600,400,1200,700,500,350,200,150\n";  // lit > pop
  content += "Alpha,Bad2,2011,1000,700,400,700,400,300,350,200,150\n";   // m+f != t
  content += "Alpha,Bad3,2011,1000,600,400,700,400,300,350,-2,150\n";    // negative
  content += "Alpha,Bad4,2011,notanumber,600,400,700,400,300,350,200,150\n";
  const auto path = tmp.file("units.csv", content);
  LoadReport report;
  const auto records = load_units_csv(path, &report);
  CHECK(records.size() == 1);
  CHECK(report.rows_read == 5);
  REQUIRE(report.rejects.size() == 4);
  CHECK(report.rejects[0].line == 3);
  CHECK(report.rejects[0].message.find("exceeds population") !=
        std::string::npos);
  CHECK(report.rejects[1].message.find("does not equal the total") !=
        std::string::npos);
}

TEST_CASE("load_units_csv tolerates missing sex-split columns") {
  TempDir tmp;
  const auto path = tmp.file("totals.csv",
                             "state,district,year,pop_t,lit_t,work_t\n"
                             "Alpha,A1,2011,1000,700,350\n");
  const auto records = load_units_csv(path);
  REQUIRE(records.size() == 1);
  CHECK_FALSE(records[0].population.male.has_value());
  CHECK(derive_indicator(records[0], Indicator::parse("lr")) ==
        doctest::Approx(70.0));
  CHECK_THROWS_AS(derive_indicator(records[0], Indicator::parse("sr-lr")),
                  IndicatorUndefinedError);
}

TEST_CASE("load_units_csv keeps extra numeric columns") {
  TempDir tmp;
  const auto path = tmp.file(
      "extra.csv",
      "state,district,year,pop_t,lit_t,work_t,density,note\n"
      "Alpha,A1,2011,1000,700,350,12.5,hello\n");
  const auto records = load_units_csv(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].extra.at("density") == doctest::Approx(12.5));
  CHECK(records[0].extra.count("note") == 0);  // non-numeric, skipped
}

TEST_CASE("load_units_csv handles empty and broken files") {
  TempDir tmp;
  LoadReport report;
  const auto empty = tmp.file("empty.csv", "");
  CHECK(load_units_csv(empty, &report).empty());
  CHECK(report.warnings.size() == 1);

  const auto bad_header = tmp.file("bad.csv", "foo,bar\n1,2\n");
  CHECK_THROWS_AS(load_units_csv(bad_header), FormatError);

  CHECK_THROWS_AS(load_units_csv(tmp.path / "missing.csv"), FileError);
}

TEST_CASE("quoted fields survive commas") {
  TempDir tmp;
  const auto path = tmp.file("quoted.csv",
                             "state,district,year,pop_t,lit_t,work_t\n"
                             "\"Alpha, North\",A1,2011,1000,700,350\n");
  const auto records = load_units_csv(path);
  REQUIRE(records.size() == 1);
  CHECK(records[0].state == "Alpha, North");
}

TEST_CASE("series CSV round-trips") {
  TempDir tmp;
  RankSizeSeries series;
  series.stratum_id = "S, with comma";
  series.indicator = Indicator::parse("custom");
  series.year = 2020;
  series.entries = {{"u1", 1, 100.125}, {"u2", 2, 3.0000000001}};
  const auto path = tmp.path / "series.csv";
  write_series_csv(path, {series});

  LoadReport report;
  const auto loaded = load_series_csv(path, &report);
  REQUIRE(loaded.size() == 1);
  CHECK(loaded[0].stratum_id == "S, with comma");
  CHECK(loaded[0].year == 2020);
  CHECK(loaded[0].entries[0].size == 100.125);
  CHECK(loaded[0].entries[1].size == 3.0000000001);
}

TEST_CASE("loading identical files twice yields identical series") {
  TempDir tmp;
  std::string content = kUnitsHeader;
  content += "Alpha,A1,2011,1000,600,400,700,400,300,350,200,150\n";
  content += "Alpha,A2,2011,1000,600,400,700,400,300,350,200,150\n";  // tie
  content += "Alpha,A3,2011,2000,1100,900,900,500,400,800,500,300\n";
  content += "Alpha,A4,2011,1500,800,700,900,500,400,700,400,300\n";
  content += "Alpha,A5,2011,1200,700,500,800,450,350,500,300,200\n";
  const auto path = tmp.file("units.csv", content);

  auto build = [&] {
    const auto records = load_units_csv(path);
    const auto strata = group_by_state(records, 2011, 5);
    return build_series(strata.at(0), Indicator::parse("population"));
  };
  const auto first = build();
  const auto second = build();
  REQUIRE(first.size() == second.size());
  for (int i = 0; i < first.size(); ++i) {
    CHECK(first.entries[static_cast<std::size_t>(i)].unit_id ==
          second.entries[static_cast<std::size_t>(i)].unit_id);
    CHECK(first.entries[static_cast<std::size_t>(i)].size ==
          second.entries[static_cast<std::size_t>(i)].size);
  }
}

}  // TEST_SUITE
