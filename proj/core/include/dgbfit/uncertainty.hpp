#pragma once

#include <string>

#include "dgbfit/dgb.hpp"

namespace dgbfit {

/// Entropy of the fitted distribution as a share of its maximum log n:
///   UP = entropy(params) / log(n) * 100.
/// Equals 100 exactly iff a = b = 0 (uniform spread across units) and
/// approaches 0 as the mass concentrates in one unit. Throws
/// InvalidDomainError when n < 2 (log 1 = 0 denominator).
double uncertainty_percentage(const DgbParams& params);

/// One stratum's uncertainty summary for a given indicator and year.
struct UncertaintyRecord {
  std::string stratum_id;
  std::string indicator;
  int year = 0;
  int n_units = 0;
  double entropy = 0.0;  // nats
  double up = 0.0;       // percent
};

/// Year-over-year change later.up - earlier.up. Throws ComparisonError
/// unless both records refer to the same stratum and indicator.
double up_delta(const UncertaintyRecord& earlier,
                const UncertaintyRecord& later);

}  // namespace dgbfit
