#include "gmext/scalar_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmext/error.hpp"

namespace gmext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> z_quadrature(const RadialGrid& grid, int N, std::span<const double> A,
                                 double tail_exponent, bool include_tail) {
  if (N < 3) throw Error(ErrorCode::precondition, "barrier Z requires N >= 3");
  const std::size_t n = grid.size();
  const double h = grid.step();
  const double nm2 = N - 2.0;
  std::vector<double> M(n, 0.0);
  double prev = std::pow(grid.r(0), N) * A[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = std::pow(grid.r(i), N) * A[i];
    M[i] = M[i - 1] + 0.5 * h * (prev + cur);
    prev = cur;
  }
  const double R = grid.outer();
  std::vector<double> Z(n, 0.0);
  if (include_tail) {
    double tail = M[n - 1] * std::pow(R, -nm2) / nm2;
    if (A[n - 1] != 0.0) {
      if (!(tail_exponent > 2.0)) {
        throw Error(ErrorCode::nonintegrable_source,
                    "source tail r^-" + std::to_string(tail_exponent) + " has divergent t*A(t)");
      }
      tail += A[n - 1] * R * R / ((tail_exponent - 2.0) * nm2);
    }
    Z[n - 1] = tail;
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    Z[i] = Z[i + 1] + 0.5 * h *
                          (std::pow(grid.r(i), -nm2) * M[i] + std::pow(grid.r(i + 1), -nm2) * M[i + 1]);
  }
  return Z;
}

double phi(double z, double s) { return s == 0.0 ? z : std::pow((1.0 + s) * z, 1.0 / (1.0 + s)); }

}  // namespace

void NonlinearitySpec::validate() const {
  if (kind == Kind::power_singular && !(s >= 0.0 && std::isfinite(s))) {
    throw Error(ErrorCode::invalid_argument, "nonlinearity exponent s must be >= 0");
  }
}

double NonlinearitySpec::value(double t) const {
  if (kind == Kind::constant || s == 0.0) return 1.0;
  return std::pow(t, -s);
}

double NonlinearitySpec::derivative(double t) const {
  if (kind == Kind::constant || s == 0.0) return 0.0;
  return -s * std::pow(t, -s - 1.0);
}

double PowerLaw::operator()(double r) const { return amplitude * std::pow(r, -exponent); }

GridFunction barrier_Z(GridPtr grid, int N, const std::function<double(double)>& A,
                       double tail_exponent, bool include_tail) {
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = A(grid->r(i));
    if (!(values[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "source must be >= 0");
  }
  auto Z = z_quadrature(*grid, N, values, tail_exponent, include_tail);
  return GridFunction(std::move(grid), std::move(Z));
}

GridFunction barrier_Z(GridPtr grid, int N, const PowerLaw& A, bool include_tail) {
  if (!(A.amplitude >= 0.0)) throw Error(ErrorCode::invalid_argument, "amplitude must be >= 0");
  if (A.amplitude == 0.0) return GridFunction::zeros(std::move(grid));
  if (include_tail && !(A.exponent > 2.0)) {
    throw Error(ErrorCode::nonintegrable_source,
                "source r^-" + std::to_string(A.exponent) + " has divergent t*A(t)");
  }
  return barrier_Z(std::move(grid), N, std::function<double(double)>(A), A.exponent, include_tail);
}

GridFunction barrier_W(const GridFunction& Z, const NonlinearitySpec& g) {
  g.validate();
  std::vector<double> W(Z.size());
  for (std::size_t i = 0; i < W.size(); ++i) {
    if (!(Z[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "barrier Z must be >= 0");
    W[i] = phi(Z[i], g.exponent());
  }
  return GridFunction(Z.grid_ptr(), std::move(W));
}

double local_decay_exponent(int N, double alpha, double s, double r0, double R) {
  const double critical = N + s * (N - 2.0);
  if (std::abs(alpha - critical) <= 1e-12 * critical) {
    return (2.0 - N) + (1.0 / (1.0 + s)) / std::log(R / r0);
  }
  if (alpha < critical) return -(alpha - 2.0) / (1.0 + s);
  return 2.0 - N;
}

double closure_tail_exponent(int N, double alpha, const NonlinearitySpec& g, double r0, double R) {
  const double s = g.exponent();
  if (s == 0.0 || !std::isfinite(alpha)) return alpha;
  return alpha + s * local_decay_exponent(N, alpha, s, r0, R);
}

double combined_tail_exponent(std::span<const double> values, std::span<const double> exponents) {
  if (values.size() != exponents.size()) {
    throw Error(ErrorCode::invalid_argument, "tail exponent size mismatch");
  }
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] <= 0.0) continue;
    if (!(exponents[j] > 2.0)) {
      throw Error(ErrorCode::nonintegrable_source,
                  "source term r^-" + std::to_string(exponents[j]) + " is not integrable");
    }
    total += values[j];
    weighted += values[j] / (exponents[j] - 2.0);
  }
  if (total <= 0.0) return kInf;
  return 2.0 + total / weighted;
}

double estimate_tail_exponent(const GridFunction& f) {
  const std::size_t n = f.size();
  if (n < 2 || f[n - 1] <= 0.0 || f[n - 2] <= 0.0) return kInf;
  return -(std::log(f[n - 1]) - std::log(f[n - 2])) / f.grid().step();
}

ScalarSolution solve_monotone(const RadialOperator& op, const GridFunction& Psi,
                              const NonlinearitySpec& g, const MonotoneOptions& options) {
  g.validate();
  const RadialGrid& grid = op.grid();
  const std::size_t n = grid.size();
  if (Psi.size() != n) throw Error(ErrorCode::invalid_argument, "Psi lives on a different grid");
  for (double value : Psi.values()) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw Error(ErrorCode::invalid_argument, "Psi must be finite and >= 0");
    }
  }
  if (!(options.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be > 0");
  if (!(options.start_scale >= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "start_scale below 1 is not a supersolution");
  }
  double previous_delta = kInf;
  for (double delta : options.delta_schedule) {
    if (!(delta > 0.0) || !(delta < previous_delta)) {
      throw Error(ErrorCode::invalid_argument, "delta schedule must be positive and decreasing");
    }
    previous_delta = delta;
  }
  if (options.delta_schedule.empty() && !options.newton_acceleration && g.exponent() > 0.0) {
    throw Error(ErrorCode::precondition,
                "a delta = 0 start without acceleration has no positive subsolution");
  }
  if (Psi.max() <= 0.0) throw Error(ErrorCode::degenerate, "Psi vanishes identically");

  const int N = op.dimension();
  const double s = g.exponent();
  const bool far = op.outer_mode() == OuterMode::far_field;
  const std::size_t last = n - 1;
  const std::size_t free_rows = far ? n : n - 1;

  double weight = 1.0;
  if (far) {
    const double alpha = options.psi_tail_exponent.value_or(estimate_tail_exponent(Psi));
    const double beta = closure_tail_exponent(N, alpha, g, grid.r0(), grid.outer());
    weight = std::isfinite(beta) ? op.far_field_weight(beta) : 1.0;
  }

  // Discrete Z with the same outer closure as the w-problem; phi(Z) is then a
  // discrete supersolution because phi is concave and increasing.
  std::vector<double> rhs(Psi.values().begin(), Psi.values().end());
  double outer_value = 0.0;
  if (far) {
    rhs[last] *= weight;
  } else if (options.dirichlet == DirichletData::barrier) {
    const double alpha = options.psi_tail_exponent.value_or(estimate_tail_exponent(Psi));
    const auto Zq = z_quadrature(grid, N, Psi.values(), alpha, true);
    rhs[last] = Zq[last];
    outer_value = phi(Zq[last], s);
  } else {
    rhs[last] = 0.0;
  }
  auto Z = solve_tridiagonal(op.sub(), op.diag(), op.super(), rhs);
  std::vector<double> upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < free_rows && !(Z[i] > 0.0)) {
      throw Error(ErrorCode::degenerate, "upper barrier is not positive at r = " +
                                             std::to_string(grid.r(i)));
    }
    upper[i] = options.start_scale * phi(std::max(Z[i], 0.0), s);
  }
  if (!far) upper[last] = std::max(upper[last], outer_value);

  std::vector<double> shift(n, 0.0);
  auto row_scale = [&](std::size_t i) { return far && i == last ? weight : 1.0; };

  auto newton = [&](const std::vector<double>& base, double delta) {
    for (std::size_t i = 0; i < free_rows; ++i) {
      const double slope = Psi[i] * std::abs(g.derivative(base[i] + delta));
      shift[i] = row_scale(i) * slope;
      rhs[i] = row_scale(i) * (Psi[i] * g.value(base[i] + delta) + slope * base[i]);
    }
    if (!far) {
      shift[last] = 0.0;
      rhs[last] = outer_value;
    }
    return solve_shifted(op, shift, rhs);
  };

  MonotoneTrace trace;
  const double slack = options.order_slack;
  std::vector<double> stage_lower(n, 0.0);
  std::vector<double> deltas = options.delta_schedule;
  deltas.push_back(0.0);

  std::vector<double> w;
  std::vector<double> lower;
  for (double delta : deltas) {
    ++trace.stages;
    w = upper;
    lower = stage_lower;
    if (options.newton_acceleration) {
      const auto sub = newton(w, delta);
      for (std::size_t i = 0; i < n; ++i) lower[i] = std::max(lower[i], std::min(sub[i], w[i]));
    }
    for (std::size_t i = 0; i < free_rows; ++i) {
      if (s > 0.0 && !(lower[i] + delta > 0.0)) {
        throw Error(ErrorCode::degenerate,
                    "no positive subsolution at r = " + std::to_string(grid.r(i)));
      }
    }

    std::size_t sweeps = 0;
    while (true) {
      if (++sweeps > options.max_sweeps) {
        throw Error(ErrorCode::no_convergence, "monotone iteration exceeded " +
                                                   std::to_string(options.max_sweeps) +
                                                   " sweeps at delta = " + std::to_string(delta));
      }
      ++trace.sweeps;
      for (std::size_t i = 0; i < free_rows; ++i) {
        const double K = Psi[i] * std::abs(g.derivative(lower[i] + delta));
        shift[i] = row_scale(i) * K;
        rhs[i] = row_scale(i) * (Psi[i] * g.value(w[i] + delta) + K * w[i]);
      }
      if (!far) {
        shift[last] = 0.0;
        rhs[last] = outer_value;
      }
      auto next = solve_shifted(op, shift, rhs);

      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double scale = std::max(std::abs(w[i]), std::numeric_limits<double>::min());
        const double rise = (next[i] - w[i]) / scale;
        if (rise > slack) {
          ++trace.order_violations;
          trace.max_order_excess = std::max(trace.max_order_excess, rise);
        }
        const double below = (lower[i] - next[i]) / scale;
        const double above = (next[i] - upper[i]) / std::max(upper[i], scale);
        if (below > slack || above > slack) {
          ++trace.bound_violations;
          trace.max_bound_excess = std::max(trace.max_bound_excess, std::max(below, above));
        }
        next[i] = std::max(std::min(next[i], w[i]), lower[i]);
        change = std::max(change, (w[i] - next[i]) / scale);
      }
      w = std::move(next);

      if (options.newton_acceleration) {
        const auto sub = newton(w, delta);
        for (std::size_t i = 0; i < n; ++i) lower[i] = std::max(lower[i], std::min(sub[i], w[i]));
      }
      double gap = 0.0;
      for (std::size_t i = 0; i < free_rows; ++i) {
        gap = std::max(gap, (w[i] - lower[i]) / std::max(w[i], std::numeric_limits<double>::min()));
      }
      if (change < options.tol || gap < options.tol) break;
    }

    for (std::size_t i = 0; i < free_rows; ++i) {
      if (!(w[i] > 0.0)) {
        throw Error(ErrorCode::degenerate,
                    "iterates collapsed at r = " + std::to_string(grid.r(i)));
      }
    }
    stage_lower = options.newton_acceleration ? lower : w;
  }

  const auto& grid_ptr = op.grid_ptr();
  return ScalarSolution{GridFunction(grid_ptr, std::move(w)),
                        BarrierPair{GridFunction(grid_ptr, std::move(lower)),
                                    GridFunction(grid_ptr, std::move(upper))},
                        trace};
}

}  // namespace gmext
