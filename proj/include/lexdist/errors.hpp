#pragma once

#include <stdexcept>
#include <string>

namespace lexdist {

// Bad user input: missing files, malformed records, invalid configuration.
// The CLI maps this to exit code 2; everything else exits 1.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lexdist
