#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gmext {

enum class ErrorCode {
  invalid_argument,
  sigma_undefined,
  sigma_out_of_range,
  degenerate_exponent,
  unknown_system_kind,
  no_inhibitor_solution,
  nonintegrable_source,
  no_convergence,
  degenerate,
  diverged,
  window_too_narrow,
  collinear,
  precondition,
  singular_system,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Error carrying a stable tag; the CLI prints the tag verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gmext
