#include "gmext/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gmext/error.hpp"

namespace gmext {

RadialGrid::RadialGrid(double r0, double R, std::size_t n) : r0_(r0), R_(R) {
  if (!(r0 > 0.0) || !(R > r0) || !std::isfinite(R)) {
    throw Error(ErrorCode::invalid_argument, "grid needs 0 < r0 < R");
  }
  if (n < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least two nodes");
  const double span = std::log(R / r0);
  h_ = span / static_cast<double>(n - 1);
  xi_.resize(n);
  r_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    xi_[i] = h_ * static_cast<double>(i);
    r_[i] = r0 * std::exp(xi_[i]);
  }
  xi_.back() = span;
  r_.front() = r0;
  r_.back() = R;
}

std::pair<std::size_t, std::size_t> RadialGrid::index_range(double lo, double hi) const {
  const auto first = std::lower_bound(r_.begin(), r_.end(), lo * (1.0 - 1e-12));
  auto last = std::upper_bound(r_.begin(), r_.end(), hi * (1.0 + 1e-12));
  if (first == r_.end() || last == r_.begin() || first >= last) {
    throw Error(ErrorCode::window_too_narrow, "no grid nodes inside [" + std::to_string(lo) +
                                                  ", " + std::to_string(hi) + "]");
  }
  return {static_cast<std::size_t>(first - r_.begin()),
          static_cast<std::size_t>(last - r_.begin()) - 1};
}

GridPtr build_grid(double r0, double R, std::size_t n) {
  return std::make_shared<const RadialGrid>(r0, R, n);
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::invalid_argument, "null grid");
  if (values_.size() != grid_->size()) {
    throw Error(ErrorCode::invalid_argument, "value count does not match grid size");
  }
}

GridFunction GridFunction::zeros(GridPtr grid) {
  const auto n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(double)>& f) {
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(grid->r(i));
  return GridFunction(std::move(grid), std::move(values));
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

RadialOperator::RadialOperator(GridPtr grid, int N, OuterMode outer)
    : grid_(std::move(grid)), N_(N), outer_(outer) {
  if (!grid_) throw Error(ErrorCode::invalid_argument, "null grid");
  if (N < 3) throw Error(ErrorCode::precondition, "radial operator requires N >= 3");
  const std::size_t n = grid_->size();
  const double h = grid_->step();
  const double r0 = grid_->r0();
  const double nm2 = N - 2.0;
  sub_.assign(n, 0.0);
  diag_.assign(n, 0.0);
  sup_.assign(n, 0.0);

  // Face weights r_{i+1/2}^{N-2}, with r_{i+1/2} = r0 exp(xi_i + h/2).
  auto face = [&](double xi) { return std::pow(r0 * std::exp(xi), nm2); };
  const auto xi = grid_->xi();

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double c = std::pow(grid_->r(i), -static_cast<double>(N)) / (h * h);
    const double left = face(xi[i] - 0.5 * h);
    const double right = face(xi[i] + 0.5 * h);
    if (i == 0) {
      // Ghost node w_{-1} = w_1.
      diag_[0] = c * (left + right);
      sup_[0] = -c * (left + right);
    } else {
      sub_[i] = -c * left;
      diag_[i] = c * (left + right);
      sup_[i] = -c * right;
    }
  }

  const std::size_t last = n - 1;
  if (outer_ == OuterMode::dirichlet) {
    diag_[last] = 1.0;
  } else {
    // Robin row w_xi + (N-2) w = g with the ghost node eliminated.
    const double c = std::pow(grid_->outer(), -static_cast<double>(N)) / (h * h);
    const double left = face(xi[last] - 0.5 * h);
    const double right = face(xi[last] + 0.5 * h);
    sub_[last] = -c * (left + right);
    diag_[last] = c * (left + right + 2.0 * h * nm2 * right);
  }
}

double RadialOperator::far_field_weight(double tail_exponent) const {
  if (!(tail_exponent > 2.0)) {
    throw Error(ErrorCode::nonintegrable_source,
                "far-field closure needs a source tail exponent > 2, got " +
                    std::to_string(tail_exponent));
  }
  const double h = grid_->step();
  const double R = grid_->outer();
  const double right = std::pow(R * std::exp(0.5 * h), N_ - 2.0);
  return 1.0 + 2.0 * right * std::pow(R, 2.0 - N_) / (h * (tail_exponent - 2.0));
}

double RadialOperator::outer_rhs(double source_at_outer, const OuterCondition& outer) const {
  if (outer.mode != outer_) {
    throw Error(ErrorCode::invalid_argument, "outer condition does not match operator");
  }
  if (outer_ == OuterMode::dirichlet) return outer.value;
  return source_at_outer * far_field_weight(outer.value);
}

std::vector<double> RadialOperator::apply(std::span<const double> w) const {
  const std::size_t n = diag_.size();
  if (w.size() != n) throw Error(ErrorCode::invalid_argument, "size mismatch in apply");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag_[i] * w[i];
    if (i > 0) acc += sub_[i] * w[i - 1];
    if (i + 1 < n) acc += sup_[i] * w[i + 1];
    out[i] = acc;
  }
  return out;
}

bool RadialOperator::is_m_matrix() const {
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    if (!(diag_[i] > 0.0) || sub_[i] > 0.0 || sup_[i] > 0.0) return false;
    const double off = -sub_[i] - sup_[i];
    if (diag_[i] < off * (1.0 - 1e-12)) return false;
  }
  return true;
}

RadialOperator assemble_operator(GridPtr grid, int N, OuterMode outer) {
  return RadialOperator(std::move(grid), N, outer);
}

std::vector<double> solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n || n == 0) {
    throw Error(ErrorCode::invalid_argument, "tridiagonal size mismatch");
  }
  std::vector<double> c_star(n);
  std::vector<double> x(n);
  double pivot = diag[0];
  if (pivot == 0.0) throw Error(ErrorCode::singular_system, "zero pivot in row 0");
  c_star[0] = super[0] / pivot;
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = diag[i] - sub[i] * c_star[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw Error(ErrorCode::singular_system, "zero pivot in row " + std::to_string(i));
    }
    c_star[i] = super[i] / pivot;
    x[i] = (rhs[i] - sub[i] * x[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_star[i] * x[i + 1];
  return x;
}

std::vector<double> solve_shifted(const RadialOperator& op, std::span<const double> shift,
                                  std::span<const double> rhs) {
  const std::size_t n = op.diag().size();
  if (shift.size() != n) throw Error(ErrorCode::invalid_argument, "shift size mismatch");
  std::vector<double> diag(op.diag().begin(), op.diag().end());
  const std::size_t rows = op.outer_mode() == OuterMode::dirichlet ? n - 1 : n;
  for (std::size_t i = 0; i < rows; ++i) diag[i] += shift[i];
  return solve_tridiagonal(op.sub(), diag, op.super(), rhs);
}

GridFunction solve_linear(const RadialOperator& op, const GridFunction& rhs,
                          const OuterCondition& outer) {
  if (rhs.grid_ptr() != op.grid_ptr() && rhs.size() != op.grid().size()) {
    throw Error(ErrorCode::invalid_argument, "rhs lives on a different grid");
  }
  for (double value : rhs.values()) {
    if (!(value >= 0.0)) throw Error(ErrorCode::invalid_argument, "rhs must be nonnegative");
  }
  std::vector<double> b(rhs.values().begin(), rhs.values().end());
  b.back() = op.outer_rhs(b.back(), outer);
  auto w = solve_tridiagonal(op.sub(), op.diag(), op.super(), b);
  return GridFunction(op.grid_ptr(), std::move(w));
}

GridFunction solve_linear(const RadialOperator& op, const GridFunction& rhs, double outer_value) {
  if (!(outer_value >= 0.0)) throw Error(ErrorCode::invalid_argument, "outer value must be >= 0");
  return solve_linear(op, rhs, OuterCondition::dirichlet(outer_value));
}

}  // namespace gmext
