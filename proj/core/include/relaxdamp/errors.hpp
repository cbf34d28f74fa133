#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace relaxdamp {

enum class ErrorKind {
  // model
  DegenerateShock,
  InvalidParam,
  OutOfDomain,
  ValidationFailed,
  Precondition,
  // profile
  NotApplicable,
  NoUnstableDirection,
  NoConnection,
  TailBelowNoise,
  // eigenframe
  NotStrictlyHyperbolic,
  Characteristic,
  GapTooSmall,
  NotDissipative,
  // spectral
  ScanTooCoarse,
  PairingAmbiguous,
  // dynamics
  BudgetExceeded,
  CFLViolation,
  BlowUp,
  // characteristics
  NotBounded,
  EpsilonTooLarge,
  // damping
  Unsupported,
  EmptyFeasible,
  // config
  ParseError,
  ValidationError,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace relaxdamp
