#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace antikz {

enum class ErrorKind {
  Domain,
  SingularMode,
  DegenerateGap,
  Length,
  GridMismatch,
  NonFinite,
  MissingMode,
  InsufficientData,
  NonPositive,
  NoMinimum,
  MissingBaseline,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace antikz
