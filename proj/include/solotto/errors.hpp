#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace solotto {

enum class ErrorKind {
  Validation,      // bad configuration or arguments
  Domain,          // argument outside the physical domain of a formula
  NoRoot,          // bracketed root search failed
  Breakdown,       // |gN| <= 1 somewhere along a pulse, sech ansatz invalid
  BlowUp,          // width collapsed to a <= 0 during integration
  NonConvergence,  // ground-state iteration did not converge
  BoxTooSmall,     // wavefunction does not decay at the box edge
  NormDrift,       // real-time evolution lost norm
  GridMismatch,
  UndefinedBound,  // quantum speed limit undefined (non-positive shortcut energy)
  Singular,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for a failure of this kind: 2 for input problems,
/// 3 for numerical failures.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace solotto
