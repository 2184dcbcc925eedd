#pragma once

#include <stdexcept>
#include <string>

namespace partlab {

// Thrown when an operation would exceed a configured resource ceiling
// (table size, fractal argument, trace node budget, scan window). Callers
// distinguish this from std::invalid_argument, which signals a malformed
// or out-of-contract argument.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace partlab
