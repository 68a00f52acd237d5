#include "dgbfit/dgb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "dgbfit/errors.hpp"

#include "accum.hpp"

namespace dgbfit {

namespace {

inline double log_weight(double a, double b, int n, int rank) {
  return b * std::log(static_cast<double>(n + 1 - rank)) -
         a * std::log(static_cast<double>(rank));
}

void check_rank(const DgbParams& params, int rank) {
  if (rank < 1 || rank > params.n()) {
    throw InvalidRankError("rank " + std::to_string(rank) +
                           " outside [1, " + std::to_string(params.n()) + "]");
  }
}

}  // namespace

double log_normalizer(double a, double b, int n) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidParameterError("exponents must be finite");
  }
  if (n < 1) {
    throw InvalidDomainError("rank count must be at least 1");
  }

  double max_lw = -std::numeric_limits<double>::infinity();
  for (int r = 1; r <= n; ++r) {
    max_lw = std::max(max_lw, log_weight(a, b, n, r));
  }
  detail::KahanSum sum;
  for (int r = 1; r <= n; ++r) {
    sum.add(std::exp(log_weight(a, b, n, r) - max_lw));
  }
  return -(max_lw + std::log(sum.value()));
}

DgbParams::DgbParams(double a, double b, int n)
    : a_(a), b_(b), n_(n), log_norm_(log_normalizer(a, b, n)) {}

double log_pmf(const DgbParams& params, int rank) {
  check_rank(params, rank);
  return params.log_norm() +
         log_weight(params.a(), params.b(), params.n(), rank);
}

double pmf(const DgbParams& params, int rank) {
  return std::exp(log_pmf(params, rank));
}

double cdf(const DgbParams& params, int rank) {
  check_rank(params, rank);
  detail::KahanSum sum;
  for (int r = 1; r <= rank; ++r) {
    sum.add(std::exp(params.log_norm() +
                     log_weight(params.a(), params.b(), params.n(), r)));
  }
  return sum.value();
}

double entropy(const DgbParams& params) {
  // S = -sum f log f with log f = log A + lw(r), folded into
  // S = -log A - sum_r f(r) * lw(r).
  detail::KahanSum weighted;
  for (int r = 1; r <= params.n(); ++r) {
    const double lw = log_weight(params.a(), params.b(), params.n(), r);
    weighted.add(std::exp(params.log_norm() + lw) * lw);
  }
  return -params.log_norm() - weighted.value();
}

std::vector<int> sample(const DgbParams& params, std::size_t count,
                        std::uint64_t seed) {
  if (count < 1) {
    throw InvalidDomainError("sample count must be at least 1");
  }

  const int n = params.n();
  std::vector<double> cum(static_cast<std::size_t>(n));
  detail::KahanSum sum;
  for (int r = 1; r <= n; ++r) {
    sum.add(std::exp(params.log_norm() +
                     log_weight(params.a(), params.b(), params.n(), r)));
    cum[static_cast<std::size_t>(r - 1)] = sum.value();
  }

  std::mt19937_64 engine(seed);
  std::vector<int> ranks;
  ranks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // top 53 bits -> uniform double in [0, 1); avoids the
    // implementation-defined std::uniform_real_distribution
    const double u =
        static_cast<double>(engine() >> 11) * 0x1.0p-53;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const auto idx = std::min<std::ptrdiff_t>(it - cum.begin(), n - 1);
    ranks.push_back(static_cast<int>(idx) + 1);
  }
  return ranks;
}

}  // namespace dgbfit
