#include <unistd.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dgbfit/data.hpp"
#include "dgbfit/report.hpp"
#include "dgbfit/synth.hpp"

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("dgbfit-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DGBFIT_CLI_PATH) + " " + args +
                          " >/dev/null 2>/dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 8 strata x 6..13 districts, deterministic synthetic counts
std::string synthetic_units_csv() {
  std::string text =
      "state,district,year,pop_t,pop_m,pop_f,lit_t,lit_m,lit_f,work_t,work_m,"
      "work_f\n";
  unsigned long long x = 12345;
  auto next = [&x]() {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
  };
  for (int s = 0; s < 8; ++s) {
    const int districts = 6 + s;
    for (int d = 0; d < districts; ++d) {
      const long long pop_m = 40000 + static_cast<long long>(next() % 400000);
      const long long pop_f = 40000 + static_cast<long long>(next() % 400000);
      const long long lit_m = pop_m * (45 + static_cast<long long>(next() % 40)) / 100;
      const long long lit_f = pop_f * (35 + static_cast<long long>(next() % 40)) / 100;
      const long long work_m = pop_m * (40 + static_cast<long long>(next() % 20)) / 100;
      const long long work_f = pop_f * (15 + static_cast<long long>(next() % 25)) / 100;
      text += "State" + std::to_string(s) + ",d" + std::to_string(d) +
              ",2011," + std::to_string(pop_m + pop_f) + "," +
              std::to_string(pop_m) + "," + std::to_string(pop_f) + "," +
              std::to_string(lit_m + lit_f) + "," + std::to_string(lit_m) +
              "," + std::to_string(lit_f) + "," + std::to_string(work_m + work_f) +
              "," + std::to_string(work_m) + "," + std::to_string(work_f) + "\n";
    }
  }
  // one undersized state that must land in the exclusion list
  text += "Tiny,d0,2011,100000,52000,48000,60000,32000,28000,40000,25000,15000\n";
  text += "Tiny,d1,2011,90000,47000,43000,50000,27000,23000,35000,22000,13000\n";
  text += "Tiny,d2,2011,80000,42000,38000,45000,24000,21000,30000,19000,11000\n";
  return text;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then fit recovers the uniform row") {
  TempDir tmp;
  const auto sim = tmp.path / "sim.csv";
  CHECK(run_cli("simulate --a 0 --b 0 --n 10 --draws 1000000 --seed 1 "
                "--output " + sim.string()) == 0);
  CHECK(run_cli("fit --input " + sim.string() + " --out-dir " +
                tmp.path.string() + " --report-name round_trip") == 0);

  const std::string csv = slurp(tmp.path / "round_trip.csv");
  CHECK(csv.find(",100.00,ok") != std::string::npos);

  const auto report = dgbfit::read_fit_report_json(tmp.path / "round_trip.json");
  REQUIRE(report.rows.size() == 1);
  CHECK(std::abs(report.rows[0].a) <= 0.02);
  CHECK(std::abs(report.rows[0].b) <= 0.02);
  CHECK(report.rows[0].up >= 99.99);
}

TEST_CASE("simulate round trip recovers nonuniform parameters") {
  TempDir tmp;
  const auto sim = tmp.path / "sim.csv";
  CHECK(run_cli("simulate --a 0.5 --b 0.5 --n 50 --draws 1000000 --seed 7 "
                "--output " + sim.string()) == 0);
  CHECK(run_cli("fit --input " + sim.string() + " --out-dir " +
                tmp.path.string() + " --report-name recovery") == 0);
  const auto report = dgbfit::read_fit_report_json(tmp.path / "recovery.json");
  REQUIRE(report.rows.size() == 1);
  CHECK(std::abs(report.rows[0].a - 0.5) <= 0.02);
  CHECK(std::abs(report.rows[0].b - 0.5) <= 0.02);
}

TEST_CASE("an exact uniform series prints the 100.00 row") {
  TempDir tmp;
  const auto series = dgbfit::exact_series(0.0, 0.0, 10, 1e6, "flat", 2011);
  const auto path = tmp.path / "exact_in.csv";
  dgbfit::write_series_csv(path, {series});
  CHECK(run_cli("fit --input " + path.string() + " --out-dir " +
                tmp.path.string() + " --report-name exact") == 0);
  const std::string csv = slurp(tmp.path / "exact.csv");
  CHECK(csv.find("flat,custom,2011,10,0.000,0.000,0.000,") !=
        std::string::npos);
  CHECK(csv.find(",100.00,ok") != std::string::npos);
}

TEST_CASE("units fit excludes undersized strata and reports the rest") {
  TempDir tmp;
  const auto units = tmp.path / "units.csv";
  std::ofstream(units) << synthetic_units_csv();

  CHECK(run_cli("fit --input " + units.string() + " --indicator lr "
                "--year 2011 --out-dir " + tmp.path.string() +
                " --report-name lr2011") == 0);

  const auto report = dgbfit::read_fit_report_json(tmp.path / "lr2011.json");
  CHECK(report.rows.size() == 9);  // pooled ALL + 8 states
  CHECK(report.rows[0].stratum == "ALL");
  REQUIRE(report.exclusions.size() == 1);
  CHECK(report.exclusions[0].stratum == "Tiny");
  CHECK(report.exclusions[0].reason == "fewer than 5 units");

  const std::string exclusions = slurp(tmp.path / "lr2011_exclusions.csv");
  CHECK(exclusions.find("Tiny,3,fewer than 5 units") != std::string::npos);
}

TEST_CASE("reports are byte-identical across reruns and job counts") {
  TempDir tmp;
  const auto units = tmp.path / "units.csv";
  std::ofstream(units) << synthetic_units_csv();

  auto run = [&](const std::string& name, int jobs) {
    CHECK(run_cli("fit --input " + units.string() +
                  " --indicator population --year 2011 --jobs " +
                  std::to_string(jobs) + " --out-dir " + tmp.path.string() +
                  " --report-name " + name) == 0);
  };
  run("first", 1);
  run("second", 1);
  run("parallel", 4);
  CHECK(slurp(tmp.path / "first.csv") == slurp(tmp.path / "second.csv"));
  CHECK(slurp(tmp.path / "first.json") == slurp(tmp.path / "second.json"));
  CHECK(slurp(tmp.path / "first.csv") == slurp(tmp.path / "parallel.csv"));
  CHECK(slurp(tmp.path / "first.json") == slurp(tmp.path / "parallel.json"));
}

TEST_CASE("correlate joins reports and self-correlation is unit") {
  TempDir tmp;
  const auto units = tmp.path / "units.csv";
  std::ofstream(units) << synthetic_units_csv();
  CHECK(run_cli("fit --input " + units.string() +
                " --indicator population --year 2011 --out-dir " +
                tmp.path.string() + " --report-name pop") == 0);
  CHECK(run_cli("fit --input " + units.string() +
                " --indicator lr --year 2011 --out-dir " + tmp.path.string() +
                " --report-name lr") == 0);

  const auto pop = (tmp.path / "pop.json").string();
  const auto lr = (tmp.path / "lr.json").string();
  CHECK(run_cli("correlate --inputs " + pop + " " + lr + " --out-dir " +
                tmp.path.string()) == 0);
  CHECK(fs::exists(tmp.path / "correlations_2011.csv"));

  // a report correlated with itself: every coefficient is 1
  CHECK(run_cli("correlate --inputs " + pop + " " + pop + " --out-dir " +
                tmp.path.string() + " --format csv") == 0);
  const std::string csv = slurp(tmp.path / "correlations_2011.csv");
  std::size_t lines = 0, units_lines = 0;
  for (std::size_t pos = csv.find('\n'); pos != std::string::npos;
       pos = csv.find('\n', pos + 1)) {
    ++lines;
  }
  for (std::size_t pos = csv.find("1.0000,true");
       pos != std::string::npos; pos = csv.find("1.0000,true", pos + 1)) {
    ++units_lines;
  }
  CHECK(lines == 7);        // header + 3 pairs x 2 statistics
  CHECK(units_lines == 6);  // all of them at r = 1
}

TEST_CASE("compare produces the delta table") {
  TempDir tmp;
  const auto units = tmp.path / "units.csv";
  std::ofstream(units) << synthetic_units_csv();
  CHECK(run_cli("fit --input " + units.string() +
                " --indicator wpr --year 2011 --out-dir " + tmp.path.string() +
                " --report-name wpr") == 0);
  const auto report = (tmp.path / "wpr.json").string();
  CHECK(run_cli("compare --from " + report + " --to " + report +
                " --out-dir " + tmp.path.string()) == 0);
  const std::string csv = slurp(tmp.path / "compare_2011_2011.csv");
  CHECK(csv.find("delta_up") != std::string::npos);
  CHECK(csv.find(",0.00\n") != std::string::npos);
}

TEST_CASE("degenerate series exits with the non-convergence code") {
  TempDir tmp;
  dgbfit::RankSizeSeries series;
  series.stratum_id = "spike";
  series.indicator = dgbfit::Indicator::parse("custom");
  series.year = 2011;
  series.entries = {{"u1", 1, 1.0}, {"u2", 2, 0.0}, {"u3", 3, 0.0},
                    {"u4", 4, 0.0}, {"u5", 5, 0.0}};
  const auto path = tmp.path / "spike.csv";
  dgbfit::write_series_csv(path, {series});
  CHECK(run_cli("fit --input " + path.string() + " --out-dir " +
                tmp.path.string() + " --report-name spike") == 3);
  const auto report = dgbfit::read_fit_report_json(tmp.path / "spike.json");
  REQUIRE(report.rows.size() == 1);
  CHECK_FALSE(report.rows[0].converged);
  const std::string csv = slurp(tmp.path / "spike.csv");
  CHECK(csv.find("non-converged") != std::string::npos);
}

TEST_CASE("error paths use the documented exit codes") {
  TempDir tmp;
  CHECK(run_cli("fit --input " + (tmp.path / "missing.csv").string()) == 2);
  CHECK(run_cli("simulate --a 0 --b 0 --n 1 --draws 10 --output " +
                (tmp.path / "x.csv").string()) == 1);
  CHECK(run_cli("fit") == 1);  // missing required flag
  CHECK(run_cli("nonsense") == 1);

  // insufficient overlap between disjoint reports
  dgbfit::FitReport r1, r2;
  r1.indicator = "population";
  r1.year = 2011;
  r2.indicator = "lr";
  r2.year = 2011;
  auto row = [](const std::string& stratum) {
    dgbfit::FitRow r;
    r.stratum = stratum;
    r.indicator = "population";
    r.year = 2011;
    r.n_units = 10;
    return r;
  };
  r1.rows = {row("a"), row("b"), row("c")};
  r2.rows = {row("x"), row("y"), row("z")};
  for (auto& rr : r2.rows) rr.indicator = "lr";
  dgbfit::write_fit_report_json(tmp.path / "r1.json", r1);
  dgbfit::write_fit_report_json(tmp.path / "r2.json", r2);
  CHECK(run_cli("correlate --inputs " + (tmp.path / "r1.json").string() + " " +
                (tmp.path / "r2.json").string() + " --out-dir " +
                tmp.path.string()) == 1);
}

}  // TEST_SUITE
