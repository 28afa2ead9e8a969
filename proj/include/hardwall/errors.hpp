#pragma once

#include <stdexcept>
#include <string>

namespace hardwall {

// Bad arguments, out-of-range parameters, violated preconditions.
// CLI maps this to exit code 1.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation produced non-finite or otherwise unusable values
// (infeasible chain, diverging iteration).  CLI maps this to exit code 2.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hardwall
