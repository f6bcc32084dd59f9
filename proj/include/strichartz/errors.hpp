#pragma once

#include <stdexcept>
#include <string>

namespace strichartz {

/// Iterative procedure failed to converge (root finder, eigensolver, line search).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical check that should hold did not (conservation drift, monotonicity,
/// inequality violation). Tools map this to exit code 2.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace strichartz
