#pragma once

#include <stdexcept>
#include <string>

namespace qxfer {

// Invalid configuration / out-of-range parameters. The CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failure during numeric evaluation (divergence, NaN, ...). CLI exit 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qxfer
