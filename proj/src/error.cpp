#include "gmext/error.hpp"

namespace gmext {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::sigma_undefined: return "SIGMA_UNDEFINED";
    case ErrorCode::sigma_out_of_range: return "SIGMA_OUT_OF_RANGE";
    case ErrorCode::degenerate_exponent: return "DEGENERATE_EXPONENT";
    case ErrorCode::unknown_system_kind: return "UNKNOWN_SYSTEM_KIND";
    case ErrorCode::no_inhibitor_solution: return "NO_INHIBITOR_SOLUTION";
    case ErrorCode::nonintegrable_source: return "NONINTEGRABLE_SOURCE";
    case ErrorCode::no_convergence: return "NO_CONVERGENCE";
    case ErrorCode::degenerate: return "DEGENERATE";
    case ErrorCode::diverged: return "DIVERGED";
    case ErrorCode::window_too_narrow: return "WINDOW_TOO_NARROW";
    case ErrorCode::collinear: return "COLLINEAR";
    case ErrorCode::precondition: return "PRECONDITION";
    case ErrorCode::singular_system: return "SINGULAR_SYSTEM";
  }
  return "UNKNOWN";
}

}  // namespace gmext
