#pragma once

#include <stdexcept>
#include <string>

namespace openset {

/// Raised for bad inputs: malformed files, violated preconditions, dimension
/// mismatches. The CLI maps it to exit status 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace openset
