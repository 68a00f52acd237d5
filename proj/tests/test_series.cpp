#include "dgbfit/errors.hpp"
#include "dgbfit/series.hpp"

#include "doctest.h"

using namespace dgbfit;

namespace {

RankSizeSeries make_series(std::vector<double> sizes) {
  RankSizeSeries s;
  s.stratum_id = "test";
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    s.entries.push_back({"u" + std::to_string(i + 1),
                         static_cast<int>(i) + 1, sizes[i]});
  }
  return s;
}

}  // namespace

TEST_SUITE("series") {

TEST_CASE("indicator labels round-trip") {
  for (const char* label :
       {"population", "lr", "wpr", "sr-lr", "sr-wpr", "custom",
        "custom:density"}) {
    CHECK(Indicator::parse(label).label() == label);
  }
  CHECK(Indicator::parse("POPULATION").kind == IndicatorKind::population);
  CHECK(Indicator::parse("custom:Density").custom_column == "density");
  CHECK_THROWS_AS(Indicator::parse("literacy"), InvalidParameterError);
}

TEST_CASE("validate accepts well-formed series") {
  auto s = make_series({5.0, 3.0, 0.0});
  CHECK_NOTHROW(s.validate());
  CHECK(s.size() == 3);
  CHECK(s.total_size() == doctest::Approx(8.0));
  CHECK(s.rank_ordered());
}

TEST_CASE("validate flags structural violations") {
  CHECK_THROWS_AS(RankSizeSeries{}.validate(), SeriesValidationError);

  auto dup = make_series({2.0, 1.0});
  dup.entries[1].rank = 1;
  CHECK_THROWS_AS(dup.validate(), SeriesValidationError);

  auto gap = make_series({2.0, 1.0});
  gap.entries[1].rank = 3;
  CHECK_THROWS_AS(gap.validate(), SeriesValidationError);

  auto negative = make_series({2.0, -1.0});
  CHECK_THROWS_AS(negative.validate(), SeriesValidationError);

  auto zeros = make_series({0.0, 0.0});
  CHECK_THROWS_AS(zeros.validate(), SeriesValidationError);
}

TEST_CASE("rank ordering is a soft property") {
  auto increasing = make_series({1.0, 2.0, 3.0});
  CHECK_NOTHROW(increasing.validate());
  CHECK_FALSE(increasing.rank_ordered());
}

}  // TEST_SUITE
