#include "relaxdamp/types.hpp"

#include "relaxdamp/errors.hpp"

#include <cmath>

namespace relaxdamp {

Grid Grid::symmetric(double half_width, int n_nodes) {
  if (n_nodes < 2 || !(half_width > 0.0)) {
    fail(ErrorKind::Precondition, "grid needs at least two nodes and a positive half-width");
  }
  return Grid{-half_width, 2.0 * half_width / static_cast<double>(n_nodes - 1), n_nodes};
}

Grid Grid::with_spacing(double half_width, double spacing) {
  if (!(spacing > 0.0)) fail(ErrorKind::Precondition, "grid spacing must be positive");
  const double cells = 2.0 * half_width / spacing;
  const long rounded = std::lround(cells);
  if (std::abs(cells - static_cast<double>(rounded)) > 1e-9 * cells) {
    fail(ErrorKind::Precondition, "grid spacing must divide the domain [-X, X]");
  }
  return symmetric(half_width, static_cast<int>(rounded) + 1);
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateShock: return "DegenerateShock";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::ValidationFailed: return "ValidationFailed";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::NoUnstableDirection: return "NoUnstableDirection";
    case ErrorKind::NoConnection: return "NoConnection";
    case ErrorKind::TailBelowNoise: return "TailBelowNoise";
    case ErrorKind::NotStrictlyHyperbolic: return "NotStrictlyHyperbolic";
    case ErrorKind::Characteristic: return "Characteristic";
    case ErrorKind::GapTooSmall: return "GapTooSmall";
    case ErrorKind::NotDissipative: return "NotDissipative";
    case ErrorKind::ScanTooCoarse: return "ScanTooCoarse";
    case ErrorKind::PairingAmbiguous: return "PairingAmbiguous";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::BlowUp: return "BlowUp";
    case ErrorKind::NotBounded: return "NotBounded";
    case ErrorKind::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::EmptyFeasible: return "EmptyFeasible";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace relaxdamp
