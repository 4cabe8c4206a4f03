#pragma once

// Fixed-point map H[u, v] = (Tu, Tv) for the coupled system on a truncated
// radial grid, box calibration and damped Picard iteration.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gmext/asymptotics.hpp"
#include "gmext/model_params.hpp"
#include "gmext/radial.hpp"
#include "gmext/scalar_solver.hpp"

namespace gmext {

struct CoupledState {
  GridFunction u;
  GridFunction v;
  std::size_t iteration = 0;
  double residual_u = 0.0;
  double residual_v = 0.0;
};

/// Extreme ratios of the four scalar barrier problems against the profiles.
struct Calibration {
  double inhibitor_min = 0.0;  // -Lw = r^-alpha w^-s, w / psi
  double inhibitor_max = 0.0;
  double source_min = 0.0;     // -Lw = r^-k, w / phi_u
  double source_max = 0.0;
  double coupled_max = 0.0;    // -Lw = h, w / phi_u
  double C3 = 0.0;
  double C4 = 0.0;
};

struct CoupledOptions {
  std::optional<double> lambda_fraction;  // lambda = fraction * threshold, overrides params.lambda
  double tol = 1e-9;
  std::size_t max_iter = 500;
  double damping = 0.5;
  double inner_tol = 1e-12;
  double calibration_widening = 1e-6;
};

/// Everything apply_H needs, fixed once per (params, grid).
struct CoupledProblem {
  ExponentSet params;
  SourceEnvelope env;
  RegimeVerdict verdict;
  RadialOperator op;
  GridFunction phi_u;
  GridFunction psi;
  GridFunction rho;
  double cross_tail = 0.0;     // tail exponent of u^p/v^q (GM) or v^q/u^p (MIXED)
  double inhibitor_tail = 0.0; // tail exponent of u^m
  Calibration calibration;
  ConstantSchedule schedule;
};

/// Classifies, calibrates C3/C4 on the grid and builds the constant schedule.
CoupledProblem prepare_problem(const ExponentSet& params, const SourceEnvelope& env, GridPtr grid,
                               const CoupledOptions& options = {});

Calibration calibrate_constants(const ExponentSet& params, const RegimeVerdict& verdict,
                                const RadialOperator& op, double widening = 1e-6);

enum class StartPoint { midpoint, low_u_high_v, high_u_low_v };

CoupledState initial_state(const CoupledProblem& problem, StartPoint start = StartPoint::midpoint);

/// One undamped application of H; residuals are evaluated at the input state.
CoupledState apply_H(const CoupledState& state, const CoupledProblem& problem,
                     double inner_tol = 1e-12);

struct NodeResiduals {
  std::vector<double> u;
  std::vector<double> v;
};

/// Per-row residuals |Aw - f| / (sum_j |A_ij w_j| + |f|).
NodeResiduals nodewise_residuals(const CoupledState& state, const CoupledProblem& problem);

/// Row residuals |Aw - f| / (sum_j |A_ij w_j| + |f|), maximised over all rows.
std::pair<double, double> residuals(const CoupledState& state, const CoupledProblem& problem);

/// Damped Picard iteration until both residuals drop below options.tol.
CoupledState iterate_to_fixed_point(const CoupledProblem& problem, CoupledState start,
                                    const CoupledOptions& options = {});

struct BoxViolation {
  double r = 0.0;
  std::string bound;  // "u>=D", "u<=E", "v>=F", "v<=G"
  double margin = 0.0;
};

struct BoxReport {
  double margin_u_lower = 0.0;  // min over window of (u - D phi) / (D phi)
  double margin_u_upper = 0.0;  // min over window of (E phi - u) / (E phi)
  double margin_v_lower = 0.0;
  double margin_v_upper = 0.0;
  std::size_t checked_nodes = 0;
  std::vector<BoxViolation> violations;

  bool holds() const noexcept { return violations.empty(); }
};

BoxReport verify_box(const CoupledState& state, const ConstantSchedule& schedule,
                     const AsymptoticProfile& u_profile, const AsymptoticProfile& v_profile,
                     const Window& window);

struct CoupledSolution {
  CoupledProblem problem;
  CoupledState state;
  BoxReport box;
};

CoupledSolution solve_system(const ExponentSet& params, const SourceEnvelope& env, GridPtr grid,
                             const CoupledOptions& options = {});

}  // namespace gmext
