#include "fasim/error.hpp"

namespace fasim {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput:
      return "invalid-input";
    case ErrorKind::DegenerateInput:
      return "degenerate-input";
    case ErrorKind::RankDeficient:
      return "rank-deficient";
    case ErrorKind::InconsistentFactors:
      return "inconsistent-factors";
    case ErrorKind::Infeasible:
      return "infeasible";
    case ErrorKind::NotConverged:
      return "not-converged";
  }
  return "unknown";
}

void throw_invalid(const std::string& message) {
  throw Error(ErrorKind::InvalidInput, message);
}

}  // namespace fasim
