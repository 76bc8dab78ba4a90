#pragma once

#include <stdexcept>
#include <string>

namespace strokefit {

/// Input that violates a type invariant or an operation precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step) {}

  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace strokefit
