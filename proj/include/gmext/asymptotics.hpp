#pragma once

// Log-log regression of decay laws r^power * log^log_power(r / r0).

#include <string>
#include <utility>

#include "gmext/model_params.hpp"
#include "gmext/radial.hpp"

namespace gmext {

struct FitResult {
  double power = 0.0;
  double log_power = 0.0;
  double amplitude = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

using Window = std::pair<double, double>;

/// [10 r0, R / 10].
Window default_window(const RadialGrid& grid);

/// True when the window reaches into the first or last decade of the grid.
bool window_touches_boundary_layer(const RadialGrid& grid, const Window& window);

/// Least squares of log w on log r. The window must span at least 1.5 decades.
FitResult fit_power(const GridFunction& w, const Window& window);

/// Least squares of log w on (log r, log log(r / r0)).
FitResult fit_power_log(const GridFunction& w, const Window& window, double r0);

struct ProfileVerdict {
  bool pass = false;
  double power_error = 0.0;
  double log_error = 0.0;
};

ProfileVerdict compare_profile(const FitResult& fit, const AsymptoticProfile& predicted,
                               double tol_power, double tol_log);

}  // namespace gmext
