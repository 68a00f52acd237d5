#pragma once

#include <stdexcept>
#include <string>

namespace dgbfit {

/// Base class for all dgbfit errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter value is non-finite or otherwise unusable.
class InvalidParameterError : public Error {
public:
  using Error::Error;
};

/// A quantity is outside its mathematical domain (n = 0, draws = 0, ...).
class InvalidDomainError : public Error {
public:
  using Error::Error;
};

/// A rank index lies outside [1, n].
class InvalidRankError : public Error {
public:
  using Error::Error;
};

/// A rank-size series violates its structural invariants.
class SeriesValidationError : public Error {
public:
  using Error::Error;
};

/// Two containers that must agree in length do not.
class DimensionMismatchError : public Error {
public:
  using Error::Error;
};

/// An indicator value cannot be derived for a unit (zero denominator,
/// missing column).
class IndicatorUndefinedError : public Error {
public:
  using Error::Error;
};

/// Two records that must refer to the same stratum/indicator do not.
class ComparisonError : public Error {
public:
  using Error::Error;
};

/// Too few strata share fits for a cross-stratum analysis.
class InsufficientStrataError : public Error {
public:
  using Error::Error;
};

/// A stratum marked excluded was asked to produce a series.
class ExcludedStratumError : public Error {
public:
  using Error::Error;
};

/// A stratum has fewer units than the configured minimum.
class StratumTooSmallError : public Error {
public:
  StratumTooSmallError(std::string stratum_id, int n_units, int min_units)
      : Error("stratum '" + stratum_id + "' has " + std::to_string(n_units) +
              " units, fewer than the required " + std::to_string(min_units)),
        stratum_id_(std::move(stratum_id)),
        n_units_(n_units),
        min_units_(min_units) {}

  const std::string& stratum_id() const noexcept { return stratum_id_; }
  int n_units() const noexcept { return n_units_; }
  int min_units() const noexcept { return min_units_; }

private:
  std::string stratum_id_;
  int n_units_;
  int min_units_;
};

/// A file could not be opened or written.
class FileError : public Error {
public:
  using Error::Error;
};

/// A file opened fine but its contents do not match the expected format.
class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace dgbfit
