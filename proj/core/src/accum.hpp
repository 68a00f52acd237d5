#pragma once

#include <cmath>

namespace dgbfit::detail {

// Neumaier-compensated summation. Long accumulations (n up to ~1e6 terms)
// stay accurate to a few ulps instead of drifting by n * eps.
class KahanSum {
public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace dgbfit::detail
