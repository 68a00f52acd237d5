#include "dgbfit/gof.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dgbfit/errors.hpp"

#include "accum.hpp"

namespace dgbfit {

double ks_measure(const RankSizeSeries& series, const DgbParams& params) {
  series.validate();
  const int n = series.size();
  if (params.n() != n) {
    throw DimensionMismatchError(
        "params cover " + std::to_string(params.n()) + " ranks but series '" +
        series.stratum_id + "' has " + std::to_string(n));
  }

  std::vector<double> observed(static_cast<std::size_t>(n));
  for (const auto& e : series.entries) {
    observed[static_cast<std::size_t>(e.rank - 1)] = e.size;
  }
  const double total = series.total_size();

  detail::KahanSum cum_predicted, cum_observed;
  double max_gap = 0.0;
  for (int r = 1; r <= n; ++r) {
    cum_predicted.add(total * pmf(params, r));
    cum_observed.add(observed[static_cast<std::size_t>(r - 1)]);
    max_gap = std::max(max_gap,
                       std::abs(cum_predicted.value() - cum_observed.value()));
  }

  // both curves end at T, so the final gap must vanish
  const double final_gap =
      std::abs(cum_predicted.value() - cum_observed.value());
  if (final_gap > 1e-9 * std::max(total, 1.0)) {
    throw Error("cumulative totals diverged in ks_measure (gap " +
                std::to_string(final_gap) + ")");
  }

  return max_gap / total;
}

}  // namespace dgbfit
