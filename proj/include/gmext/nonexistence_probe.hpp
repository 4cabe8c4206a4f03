#pragma once

// Closed-form obstructions for power-law sources and a numerical shadow of
// nonexistence: the obstructing scalar inequality solved on growing truncations.

#include <cstddef>
#include <string>
#include <vector>

#include "gmext/model_params.hpp"

namespace gmext {

/// int_1^inf t * t^-alpha dt diverges.
bool integral_criterion(double alpha);

/// liminf_{t -> inf} e^{(2 - alpha) t} (t + 1)^-s > 0.
bool criterion_2d(double alpha, double s);

struct ProbeRow {
  double R = 0.0;
  std::size_t nodes = 0;
  double floor = 0.0;             // min of w r^{N-2} on [r0, R/10]
  double peak = 0.0;              // max of w r^{N-2} on the grid
  double normalized_floor = 0.0;  // floor / peak
  std::string status;             // "ok" or the solver error tag
};

struct ProbeReport {
  std::string matched_condition;
  bool supported = false;
  std::string equation;  // the obstructing scalar problem, e.g. "-Lw = r^-2 w^-1"
  double alpha = 0.0;
  double s = 0.0;
  std::vector<ProbeRow> rows;

  /// Normalized floor strictly decreasing across the solved rows.
  bool floor_decreasing() const;
  std::string summary() const;
};

struct ProbeOptions {
  double r0 = 1.0;
  std::size_t nodes_per_decade = 200;
  std::size_t jobs = 1;
};

/// Requires a NONEXISTENCE verdict. Each truncation solves the obstructing
/// inequality with w(R) = 0; a floor that keeps falling as R grows corroborates
/// nonexistence but proves nothing.
ProbeReport degeneration_probe(const ExponentSet& params, const std::vector<double>& R_sequence,
                               const ProbeOptions& options = {});

}  // namespace gmext
