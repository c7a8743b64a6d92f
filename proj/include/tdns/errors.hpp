#pragma once

#include <stdexcept>
#include <string>

namespace tdns {

// Bad configuration, unreadable files, malformed options. CLI exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// NaN likelihoods, cache-consistency failures. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tdns
