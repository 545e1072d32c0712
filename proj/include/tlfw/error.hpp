#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tlfw {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invariant-violating input (scenario files, flags, plan/clustering mismatches).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A network whose consumption is zero everywhere; cycle times would be unbounded.
class DegenerateError : public InputError {
 public:
  using InputError::InputError;
};

/// No schedule keeps every node alive. Carries the ids of the nodes that bind.
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, std::vector<int> nodes = {})
      : Error(what), nodes_(std::move(nodes)) {}

  const std::vector<int>& nodes() const { return nodes_; }

 private:
  std::vector<int> nodes_;
};

}  // namespace tlfw
