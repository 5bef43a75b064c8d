#include "latblock/error.hpp"

namespace latblock {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "InvalidArgument";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::empty_window: return "EmptyWindow";
    case ErrorKind::empty_subsample_set: return "EmptySubsampleSet";
    case ErrorKind::non_convergent: return "NonConvergent";
    case ErrorKind::quadrature_budget_exceeded: return "QuadratureBudgetExceeded";
    case ErrorKind::unsupported_shape: return "UnsupportedShape";
    case ErrorKind::unsupported_d1_nonlinear: return "UnsupportedD1Nonlinear";
    case ErrorKind::degenerate_subsampling: return "DegenerateSubsampling";
    case ErrorKind::missing_sites: return "MissingSites";
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::zero_bias_constant: return "ZeroBiasConstant";
    case ErrorKind::insufficient_candidates: return "InsufficientCandidates";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::window_too_large: return "WindowTooLarge";
    case ErrorKind::io: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool Error::is_validation() const noexcept {
  return kind_ == ErrorKind::invalid_argument || kind_ == ErrorKind::parse ||
         kind_ == ErrorKind::dimension_mismatch;
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace latblock
