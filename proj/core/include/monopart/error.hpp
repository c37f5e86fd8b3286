#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace monopart {

enum class ErrorKind {
  NonMonotone,
  DomainMismatch,
  OutOfDomain,
  WrongOrientation,
  UnbalancedSet,
  MissingDensity,
  NotUnimodal,
  BracketFailure,
  UnsupportedShape,
  UnsupportedPrimitive,
  UnboundedV,
  TooManyCells,
  NonUniformState,
  InvalidArgument,
  InvalidScenario,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace monopart
