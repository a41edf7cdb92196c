#pragma once

#include <stdexcept>
#include <string>

namespace gap {

// Bad user input: malformed files, out-of-range parameters, shape mismatches
// at API boundaries. CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure: divergence, non-finite values, eigensolver non-convergence.
// CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / format failure. CLI maps this to exit code 4.
class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace gap
