#include "solotto/errors.hpp"

namespace solotto {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NoRoot: return "no-root";
    case ErrorKind::Breakdown: return "soliton-breakdown";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::BoxTooSmall: return "box-too-small";
    case ErrorKind::NormDrift: return "norm-drift";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::UndefinedBound: return "undefined-bound";
    case ErrorKind::Singular: return "singular-system";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Domain:
    case ErrorKind::GridMismatch:
    case ErrorKind::Io:
      return 2;
    default:
      return 3;
  }
}

}  // namespace solotto
