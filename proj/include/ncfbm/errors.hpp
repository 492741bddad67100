#pragma once

#include <stdexcept>
#include <string>

namespace ncfbm {

/// Argument outside the documented domain of an operation (e.g. H not in (0,1)).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A combinatorial or grid size cap was exceeded.
class SizeLimitError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Floating-point failure: a factorization, iteration or refinement did not behave.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A dyadic refinement that should be Cauchy is not (sewing outside its regime).
class RegimeError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A time that should sit on a dyadic grid does not.
class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ncfbm
