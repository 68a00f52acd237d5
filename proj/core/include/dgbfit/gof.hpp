#pragma once

#include "dgbfit/dgb.hpp"
#include "dgbfit/series.hpp"

namespace dgbfit {

/*
 * Kolmogorov-Smirnov-style goodness of fit between observed and model
 * cumulative rank-sizes. With T = sum of sizes, the model predicts size
 * T * f(r) at rank r; the statistic is the maximum absolute gap between
 * the two cumulative curves divided by T, so it lies in [0, 1] and is
 * invariant to rescaling all sizes. 0 means the observed sizes are exactly
 * proportional to the pmf.
 *
 * Throws DimensionMismatchError when params.n() differs from the series
 * length.
 */
double ks_measure(const RankSizeSeries& series, const DgbParams& params);

}  // namespace dgbfit
