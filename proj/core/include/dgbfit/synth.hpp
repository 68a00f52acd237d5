#pragma once

#include <cstdint>
#include <string>

#include "dgbfit/series.hpp"

namespace dgbfit {

/// Series whose sizes are exactly total * pmf(a, b, r). Its weighted MLE is
/// (a, b) by construction, which makes it the parameter-recovery oracle.
RankSizeSeries exact_series(double a, double b, int n, double total,
                            std::string stratum_id = "synthetic",
                            int year = 0);

/// Multinomial rank counts from `draws` inverse-CDF samples, aggregated per
/// rank (memory stays O(n)). Deterministic for a given seed.
RankSizeSeries sampled_series(double a, double b, int n, std::size_t draws,
                              std::uint64_t seed,
                              std::string stratum_id = "synthetic",
                              int year = 0);

}  // namespace dgbfit
