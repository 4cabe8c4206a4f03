#pragma once

// The scalar problem -Lw = Psi(r) g(w) with a reflecting inner boundary:
// explicit barriers Z and W and the monotone (delta-regularised) iteration.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gmext/radial.hpp"

namespace gmext {

struct NonlinearitySpec {
  enum class Kind { constant, power_singular };

  Kind kind = Kind::constant;
  double s = 0.0;

  static NonlinearitySpec constant() { return {Kind::constant, 0.0}; }
  static NonlinearitySpec power(double s) { return {Kind::power_singular, s}; }

  void validate() const;
  double exponent() const noexcept { return kind == Kind::constant ? 0.0 : s; }

  /// g(t) and g'(t); g(t) = t^-s or 1.
  double value(double t) const;
  double derivative(double t) const;
};

/// amplitude * r^-exponent.
struct PowerLaw {
  double amplitude = 1.0;
  double exponent = 0.0;

  double operator()(double r) const;
};

struct BarrierPair {
  GridFunction lower;
  GridFunction upper;
};

/// Z(r) = int_r^inf t^{1-N} int_{r0}^t tau^{N-1} A(tau) dtau dt by trapezoid
/// quadrature in xi, plus the analytic tail for A ~ r^-tail_exponent beyond R.
/// Without the tail Z vanishes at R.
GridFunction barrier_Z(GridPtr grid, int N, const std::function<double(double)>& A,
                       double tail_exponent, bool include_tail = true);
GridFunction barrier_Z(GridPtr grid, int N, const PowerLaw& A, bool include_tail = true);

/// Inverts int_0^W dt / g(t) = Z nodewise.
GridFunction barrier_W(const GridFunction& Z, const NonlinearitySpec& g);

/// d log w / d log r at R for -Lw = r^-alpha w^-s.
double local_decay_exponent(int N, double alpha, double s, double r0, double R);

/// Tail exponent of Psi g(w) when Psi ~ r^-alpha and w follows the scalar decay law.
double closure_tail_exponent(int N, double alpha, const NonlinearitySpec& g, double r0, double R);

/// Tail exponent of a sum of power-law terms f_j ~ r^-beta_j, defined so the
/// far-field closure of the sum equals the sum of the closures.
double combined_tail_exponent(std::span<const double> values, std::span<const double> exponents);

/// Decay rate of a positive grid function read off its last two nodes.
double estimate_tail_exponent(const GridFunction& f);

enum class DirichletData {
  barrier,  // w(R) = W(R), the supersolution value
  zero,     // w(R) = 0, barrier without the tail
};

struct MonotoneOptions {
  std::vector<double> delta_schedule = {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  double tol = 1e-10;
  std::size_t max_sweeps = 500;
  bool newton_acceleration = true;
  double start_scale = 1.0;
  DirichletData dirichlet = DirichletData::barrier;
  std::optional<double> psi_tail_exponent;
  double order_slack = 1e-9;
};

struct MonotoneTrace {
  std::size_t stages = 0;
  std::size_t sweeps = 0;
  std::size_t order_violations = 0;
  std::size_t bound_violations = 0;
  double max_order_excess = 0.0;
  double max_bound_excess = 0.0;

  bool monotone() const noexcept { return order_violations == 0 && bound_violations == 0; }
};

struct ScalarSolution {
  GridFunction w;
  BarrierPair barriers;
  MonotoneTrace trace;
};

/// Starting from the supersolution start_scale * W, iterates
///   (A + K) w_{j+1} = Psi g(w_j + delta) + K w_j,  K = Psi |g'(lower + delta)|,
/// through the delta schedule and a closing delta = 0 stage. Each stage uses
/// the previous stage's limit as subsolution; with acceleration, Newton steps
/// from below tighten the subsolution. Iterates never increase.
ScalarSolution solve_monotone(const RadialOperator& op, const GridFunction& Psi,
                              const NonlinearitySpec& g, const MonotoneOptions& options = {});

}  // namespace gmext
