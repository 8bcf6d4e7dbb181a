#pragma once

#include <stdexcept>
#include <string>

namespace lugasr {

// Base class for every recoverable toolkit error. The CLI maps these to
// exit code 1 (data error); anything else that escapes is an internal error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lugasr
