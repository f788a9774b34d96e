#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fasim {

enum class ErrorKind {
  InvalidInput,
  DegenerateInput,
  RankDeficient,
  InconsistentFactors,
  Infeasible,
  NotConverged,
};

/// Stable machine-readable name, e.g. "invalid-input".
std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_invalid(const std::string& message);

}  // namespace fasim
