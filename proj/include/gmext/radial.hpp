#pragma once

// Log-spaced radial meshes on [r0, R], the radial Laplacian with a reflecting
// (Neumann) inner row, and tridiagonal solves.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace gmext {

/// Uniform mesh in xi = log(r / r0) on [0, log(R / r0)].
class RadialGrid {
 public:
  RadialGrid(double r0, double R, std::size_t n);

  double r0() const noexcept { return r0_; }
  double outer() const noexcept { return R_; }
  std::size_t size() const noexcept { return r_.size(); }
  double step() const noexcept { return h_; }

  std::span<const double> xi() const noexcept { return xi_; }
  std::span<const double> r() const noexcept { return r_; }
  double r(std::size_t i) const { return r_[i]; }

  /// Index range [first, last] of nodes with lo <= r <= hi.
  std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const;

 private:
  double r0_;
  double R_;
  double h_;
  std::vector<double> xi_;
  std::vector<double> r_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Requires R > r0 > 0 and n >= 2.
GridPtr build_grid(double r0, double R, std::size_t n);

/// Nodal samples of a radial field on a shared grid.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);

  static GridFunction zeros(GridPtr grid);
  static GridFunction sample(GridPtr grid, const std::function<double(double)>& f);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& data() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double min() const;
  double max() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

enum class OuterMode {
  dirichlet,  // w(R) prescribed
  far_field,  // w_xi + (N-2) w = R^2 f(R) / (beta - 2): exact when f ~ r^-beta beyond R
};

struct OuterCondition {
  OuterMode mode = OuterMode::dirichlet;
  double value = 0.0;  // Dirichlet value, or tail exponent beta of the source

  static OuterCondition dirichlet(double value) { return {OuterMode::dirichlet, value}; }
  static OuterCondition far_field(double tail_exponent) {
    return {OuterMode::far_field, tail_exponent};
  }
};

/// Tridiagonal discretisation of -Laplacian in radial coordinates,
///   -r^-N (r^{N-2} w_xi)_xi,
/// with ghost-node reflection at r0 and the outer row fixed by OuterMode.
class RadialOperator {
 public:
  RadialOperator(GridPtr grid, int N, OuterMode outer);

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dimension() const noexcept { return N_; }
  OuterMode outer_mode() const noexcept { return outer_; }

  std::span<const double> sub() const noexcept { return sub_; }
  std::span<const double> diag() const noexcept { return diag_; }
  std::span<const double> super() const noexcept { return sup_; }

  /// Multiplier applied to the source on the last row under the far-field closure.
  double far_field_weight(double tail_exponent) const;

  /// Right-hand side entry of the last row for a source value f(R).
  double outer_rhs(double source_at_outer, const OuterCondition& outer) const;

  /// Row-wise product A w, boundary rows included.
  std::vector<double> apply(std::span<const double> w) const;

  /// diag > 0, off-diagonals <= 0, weak row dominance everywhere.
  bool is_m_matrix() const;

 private:
  GridPtr grid_;
  int N_;
  OuterMode outer_;
  std::vector<double> sub_;
  std::vector<double> diag_;
  std::vector<double> sup_;
};

RadialOperator assemble_operator(GridPtr grid, int N, OuterMode outer = OuterMode::dirichlet);

/// Thomas algorithm. Throws Error(singular_system) on a zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs);

/// Solves (A + diag(shift)) w = rhs where rhs already holds the outer-row entry.
/// The shift on a Dirichlet row is ignored.
std::vector<double> solve_shifted(const RadialOperator& op, std::span<const double> shift,
                                  std::span<const double> rhs);

/// -Lw = rhs with w'(r0) = 0 and the given outer condition.
GridFunction solve_linear(const RadialOperator& op, const GridFunction& rhs,
                          const OuterCondition& outer);

/// Dirichlet shorthand.
GridFunction solve_linear(const RadialOperator& op, const GridFunction& rhs, double outer_value);

}  // namespace gmext
