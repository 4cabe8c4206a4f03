#include "gmext/coupled_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <string>

#include "gmext/error.hpp"

namespace gmext {

namespace {

constexpr double kFloor = 1e-30;
constexpr double kCeiling = 1e30;

bool is_mixed(const ExponentSet& params) { return params.kind == SystemKind::mixed; }

double cross_term(const ExponentSet& x, double u, double v) {
  return is_mixed(x) ? std::pow(v, x.q) * std::pow(u, -x.p) : std::pow(u, x.p) * std::pow(v, -x.q);
}

double ratio_min(const GridFunction& w, const GridFunction& ref) {
  double out = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) out = std::min(out, w[i] / ref[i]);
  return out;
}

double ratio_max(const GridFunction& w, const GridFunction& ref) {
  double out = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) out = std::max(out, w[i] / ref[i]);
  return out;
}

MonotoneOptions inner_options(double alpha, double tol) {
  MonotoneOptions options;
  options.delta_schedule.clear();
  options.newton_acceleration = true;
  options.psi_tail_exponent = alpha;
  options.tol = tol;
  return options;
}

struct Tails {
  double cross;
  double inhibitor;
};

Tails predicted_tails(const ExponentSet& x, const RegimeVerdict& verdict, double R) {
  const double eu = verdict.u_profile->local_exponent(R);
  const double ev = verdict.v_profile->local_exponent(R);
  const double cross = is_mixed(x) ? -(x.q * ev - x.p * eu) : -(x.p * eu - x.q * ev);
  return {cross, -x.m * eu};
}

// Source of the u-equation with the outer row already closed.
std::vector<double> u_source(const CoupledProblem& pb, const GridFunction& u, const GridFunction& v) {
  const auto& x = pb.params;
  const std::size_t n = u.size();
  std::vector<double> f(n);
  double cross_last = 0.0;
  double rho_last = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double cross = cross_term(x, u[i], v[i]);
    const double rho = x.lambda * pb.rho[i];
    f[i] = cross + rho;
    cross_last = cross;
    rho_last = rho;
  }
  f[n - 1] = cross_last * pb.op.far_field_weight(pb.cross_tail) +
             rho_last * pb.op.far_field_weight(pb.env.k);
  return f;
}

std::vector<double> v_source(const CoupledProblem& pb, const GridFunction& u, const GridFunction& v) {
  const auto& x = pb.params;
  const std::size_t n = u.size();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(u[i], x.m) * std::pow(v[i], -x.s);
  const auto& grid = pb.op.grid();
  const double beta = closure_tail_exponent(x.N, pb.inhibitor_tail, NonlinearitySpec::power(x.s),
                                            grid.r0(), grid.outer());
  f[n - 1] *= pb.op.far_field_weight(beta);
  return f;
}

// Row residuals scaled by the magnitudes of the individual terms in the row.
std::vector<double> row_residuals(const RadialOperator& op, const GridFunction& w,
                                  const std::vector<double>& f) {
  const auto sub = op.sub();
  const auto diag = op.diag();
  const auto sup = op.super();
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double Aw = diag[i] * w[i];
    double scale = std::abs(Aw) + std::abs(f[i]);
    if (i > 0) {
      Aw += sub[i] * w[i - 1];
      scale += std::abs(sub[i] * w[i - 1]);
    }
    if (i + 1 < n) {
      Aw += sup[i] * w[i + 1];
      scale += std::abs(sup[i] * w[i + 1]);
    }
    if (scale > 0.0) out[i] = std::abs(Aw - f[i]) / scale;
  }
  return out;
}

double max_of(const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); }

void check_range(const GridFunction& w, const char* name) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] >= kFloor && w[i] <= kCeiling)) {
      throw Error(ErrorCode::diverged, std::string(name) + " left [1e-30, 1e30] at r = " +
                                           std::to_string(w.grid().r(i)));
    }
  }
}

}  // namespace

Calibration calibrate_constants(const ExponentSet& params, const RegimeVerdict& verdict,
                                const RadialOperator& op, double widening) {
  if (!verdict.exists() || !verdict.u_profile || !verdict.v_profile) {
    throw Error(ErrorCode::precondition, "calibration needs an existence verdict");
  }
  if (op.outer_mode() != OuterMode::far_field) {
    throw Error(ErrorCode::precondition, "calibration runs on the far-field operator");
  }
  const auto& grid_ptr = op.grid_ptr();
  const auto& grid = *grid_ptr;
  const auto& up = *verdict.u_profile;
  const auto& vp = *verdict.v_profile;
  const auto phi = GridFunction::sample(grid_ptr, [&](double r) { return up.shape(r); });
  const auto psi = GridFunction::sample(grid_ptr, [&](double r) { return vp.shape(r); });
  const auto tails = predicted_tails(params, verdict, grid.outer());

  Calibration c;
  const double alpha = tails.inhibitor;
  const auto Psi = GridFunction::sample(grid_ptr, [&](double r) { return std::pow(r, -alpha); });
  MonotoneOptions inhibitor;
  inhibitor.psi_tail_exponent = alpha;
  const auto w1 = solve_monotone(op, Psi, NonlinearitySpec::power(params.s), inhibitor);
  c.inhibitor_min = ratio_min(w1.w, psi);
  c.inhibitor_max = ratio_max(w1.w, psi);

  const auto rk = GridFunction::sample(grid_ptr, [&](double r) { return std::pow(r, -params.k); });
  const auto w3 = solve_linear(op, rk, OuterCondition::far_field(params.k));
  c.source_min = ratio_min(w3, phi);
  c.source_max = ratio_max(w3, phi);

  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = cross_term(params, phi[i], psi[i]) + rk[i];
  const std::size_t last = h.size() - 1;
  h[last] = cross_term(params, phi[last], psi[last]) * op.far_field_weight(tails.cross) +
            rk[last] * op.far_field_weight(params.k);
  const auto w4 = solve_tridiagonal(op.sub(), op.diag(), op.super(), h);
  c.coupled_max = ratio_max(GridFunction(grid_ptr, w4), phi);

  c.C3 = std::min(c.inhibitor_min, c.source_min) * (1.0 - widening);
  c.C4 = std::max({c.inhibitor_max, c.source_max, c.coupled_max}) * (1.0 + widening);
  return c;
}

CoupledProblem prepare_problem(const ExponentSet& params, const SourceEnvelope& env, GridPtr grid,
                               const CoupledOptions& options) {
  env.validate();
  if (std::abs(env.k - params.k) > 1e-12 * std::max(1.0, params.k)) {
    throw Error(ErrorCode::invalid_argument, "source envelope and exponent set disagree on k");
  }
  const auto verdict = classify(params, grid->r0());
  if (!verdict.exists()) {
    throw Error(ErrorCode::precondition,
                std::string("no existence theorem applies (") +
                    std::string(to_string(verdict.outcome)) + " " + verdict.matched_condition +
                    "); use the probe subcommand");
  }
  auto op = assemble_operator(grid, params.N, OuterMode::far_field);
  const auto calibration = calibrate_constants(params, verdict, op, options.calibration_widening);

  ExponentSet x = params;
  auto schedule = constant_schedule(x, env, calibration.C3, calibration.C4);
  if (options.lambda_fraction) {
    if (!(*options.lambda_fraction > 0.0)) {
      throw Error(ErrorCode::invalid_argument, "lambda fraction must be positive");
    }
    x.lambda = *options.lambda_fraction * schedule.threshold();
    schedule = constant_schedule(x, env, calibration.C3, calibration.C4);
  }
  if (!(x.lambda > 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be positive");

  const auto& up = *verdict.u_profile;
  const auto& vp = *verdict.v_profile;
  const auto tails = predicted_tails(x, verdict, grid->outer());
  auto phi = GridFunction::sample(grid, [&](double r) { return up.shape(r); });
  auto psi = GridFunction::sample(grid, [&](double r) { return vp.shape(r); });
  auto rho = GridFunction::sample(grid, [&](double r) { return env.rho(r); });
  return CoupledProblem{x,           env,          verdict,         std::move(op),
                        std::move(phi), std::move(psi), std::move(rho), tails.cross,
                        tails.inhibitor, calibration, schedule};
}

CoupledState initial_state(const CoupledProblem& problem, StartPoint start) {
  const auto& c = problem.schedule;
  double a = std::sqrt(c.D * c.E);
  double b = std::sqrt(c.F * c.G);
  if (start == StartPoint::low_u_high_v) {
    a = c.D;
    b = c.G;
  } else if (start == StartPoint::high_u_low_v) {
    a = c.E;
    b = c.F;
  }
  std::vector<double> u(problem.phi_u.size());
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = a * problem.phi_u[i];
    v[i] = b * problem.psi[i];
  }
  CoupledState state{GridFunction(problem.phi_u.grid_ptr(), std::move(u)),
                     GridFunction(problem.phi_u.grid_ptr(), std::move(v)), 0, 0.0, 0.0};
  std::tie(state.residual_u, state.residual_v) = residuals(state, problem);
  return state;
}

NodeResiduals nodewise_residuals(const CoupledState& state, const CoupledProblem& problem) {
  return {row_residuals(problem.op, state.u, u_source(problem, state.u, state.v)),
          row_residuals(problem.op, state.v, v_source(problem, state.u, state.v))};
}

std::pair<double, double> residuals(const CoupledState& state, const CoupledProblem& problem) {
  const auto r = nodewise_residuals(state, problem);
  return {max_of(r.u), max_of(r.v)};
}

CoupledState apply_H(const CoupledState& state, const CoupledProblem& problem, double inner_tol) {
  const auto& x = problem.params;
  if (x.kind == SystemKind::neg_activator || x.kind == SystemKind::neg_both) {
    throw Error(ErrorCode::precondition, "H is defined for GM and MIXED systems only");
  }
  if (!(state.u.min() > 0.0) || !(state.v.min() > 0.0)) {
    throw Error(ErrorCode::precondition, "state must be positive");
  }
  const auto f = u_source(problem, state.u, state.v);
  auto Tu = solve_tridiagonal(problem.op.sub(), problem.op.diag(), problem.op.super(), f);

  std::vector<double> psi(state.u.size());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::pow(state.u[i], x.m);
  ScalarSolution Tv = [&] {
    try {
      return solve_monotone(problem.op, GridFunction(state.u.grid_ptr(), std::move(psi)),
                            NonlinearitySpec::power(x.s),
                            inner_options(problem.inhibitor_tail, inner_tol));
    } catch (const Error& e) {
      throw Error(e.code(), std::string("inhibitor solve: ") + e.what());
    }
  }();

  CoupledState out{GridFunction(state.u.grid_ptr(), std::move(Tu)), std::move(Tv.w),
                   state.iteration + 1, 0.0, 0.0};
  check_range(out.u, "u");
  check_range(out.v, "v");
  std::tie(out.residual_u, out.residual_v) = residuals(state, problem);
  return out;
}

CoupledState iterate_to_fixed_point(const CoupledProblem& problem, CoupledState start,
                                    const CoupledOptions& options) {
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "damping must lie in (0, 1]");
  }
  CoupledState state = std::move(start);
  std::tie(state.residual_u, state.residual_v) = residuals(state, problem);
  const double theta = options.damping;
  while (std::max(state.residual_u, state.residual_v) >= options.tol) {
    if (state.iteration >= options.max_iter) {
      throw Error(ErrorCode::no_convergence,
                  "coupled iteration stalled after " + std::to_string(options.max_iter) +
                      " steps (residuals " + std::to_string(state.residual_u) + ", " +
                      std::to_string(state.residual_v) + ")");
    }
    const auto image = apply_H(state, problem, options.inner_tol);
    for (std::size_t i = 0; i < state.u.size(); ++i) {
      state.u[i] = (1.0 - theta) * state.u[i] + theta * image.u[i];
      state.v[i] = (1.0 - theta) * state.v[i] + theta * image.v[i];
    }
    ++state.iteration;
    check_range(state.u, "u");
    check_range(state.v, "v");
    std::tie(state.residual_u, state.residual_v) = residuals(state, problem);
  }
  return state;
}

BoxReport verify_box(const CoupledState& state, const ConstantSchedule& c,
                     const AsymptoticProfile& u_profile, const AsymptoticProfile& v_profile,
                     const Window& window) {
  BoxReport report;
  report.margin_u_lower = report.margin_u_upper = std::numeric_limits<double>::infinity();
  report.margin_v_lower = report.margin_v_upper = std::numeric_limits<double>::infinity();
  const auto& grid = state.u.grid();
  const auto [first, last] = grid.index_range(window.first, window.second);
  for (std::size_t i = first; i <= last; ++i) {
    const double r = grid.r(i);
    const double phi = u_profile.shape(r);
    const double psi = v_profile.shape(r);
    const std::array<std::pair<const char*, double>, 4> margins{{
        {"u>=D", (state.u[i] - c.D * phi) / (c.D * phi)},
        {"u<=E", (c.E * phi - state.u[i]) / (c.E * phi)},
        {"v>=F", (state.v[i] - c.F * psi) / (c.F * psi)},
        {"v<=G", (c.G * psi - state.v[i]) / (c.G * psi)},
    }};
    report.margin_u_lower = std::min(report.margin_u_lower, margins[0].second);
    report.margin_u_upper = std::min(report.margin_u_upper, margins[1].second);
    report.margin_v_lower = std::min(report.margin_v_lower, margins[2].second);
    report.margin_v_upper = std::min(report.margin_v_upper, margins[3].second);
    for (const auto& [name, margin] : margins) {
      if (margin < 0.0) report.violations.push_back({r, name, margin});
    }
    ++report.checked_nodes;
  }
  return report;
}

CoupledSolution solve_system(const ExponentSet& params, const SourceEnvelope& env, GridPtr grid,
                             const CoupledOptions& options) {
  auto problem = prepare_problem(params, env, grid, options);
  auto state = iterate_to_fixed_point(problem, initial_state(problem), options);
  auto box = verify_box(state, problem.schedule, *problem.verdict.u_profile,
                        *problem.verdict.v_profile, default_window(*grid));
  return CoupledSolution{std::move(problem), std::move(state), std::move(box)};
}

}  // namespace gmext
