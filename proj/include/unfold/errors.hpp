#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unfold {

enum class ErrorKind {
  Domain,
  Overflow,
  NoSignChange,
  MinimalityViolated,
  NoConvergence,
  NotMinimalPeriod,
  HyperbolicityLost,
  NotEscapeWindow,
  CoverageNotReached,
  DepthExceeded,
  CEViolated,
  DegenerateWindow,
  NotMisiurewicz,
  PrecisionCapExceeded,
  NoRootInBracket,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Domain and solver failures. The CLI maps every Error to exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace unfold
