#pragma once

#include <stdexcept>

namespace perfplan {

/// Malformed input file or flag value. CLI maps this to exit code 1.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fewer usable observations than model coefficients. CLI exit code 2.
struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least squares collapsed: no positive parallel term survives clamping.
struct DegenerateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No node count can satisfy the requested plan. CLI exit code 2.
struct InfeasiblePlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace perfplan
