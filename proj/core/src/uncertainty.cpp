#include "dgbfit/uncertainty.hpp"

#include <cmath>

#include "dgbfit/errors.hpp"

namespace dgbfit {

double uncertainty_percentage(const DgbParams& params) {
  if (params.n() < 2) {
    throw InvalidDomainError(
        "uncertainty percentage is undefined for fewer than 2 ranks");
  }
  return entropy(params) / std::log(static_cast<double>(params.n())) * 100.0;
}

double up_delta(const UncertaintyRecord& earlier,
                const UncertaintyRecord& later) {
  if (earlier.stratum_id != later.stratum_id) {
    throw ComparisonError("cannot compare UP across strata ('" +
                          earlier.stratum_id + "' vs '" + later.stratum_id +
                          "')");
  }
  if (earlier.indicator != later.indicator) {
    throw ComparisonError("cannot compare UP across indicators ('" +
                          earlier.indicator + "' vs '" + later.indicator +
                          "')");
  }
  return later.up - earlier.up;
}

}  // namespace dgbfit
