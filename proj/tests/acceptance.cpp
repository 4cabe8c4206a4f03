// Acceptance run: one PASS/FAIL line per criterion AC1..AC11.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "classifier_cases.hpp"
#include "gmext/asymptotics.hpp"
#include "gmext/coupled_solver.hpp"
#include "gmext/error.hpp"
#include "gmext/nonexistence_probe.hpp"
#include "gmext/scalar_solver.hpp"

using namespace gmext;
using gmext::testing::gm;

namespace {

// AC5 asks for a decay faster than r^{2-N}, which no positive superharmonic
// activator on an exterior domain can have.
const std::set<std::string> kUnattainable = {"AC5"};

struct Criterion {
  bool pass = false;
  std::string detail;
};

std::size_t scalar_runs = 0;
std::size_t scalar_non_monotone = 0;

void record(const MonotoneTrace& trace) {
  ++scalar_runs;
  if (!trace.monotone()) ++scalar_non_monotone;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

ScalarSolution scalar(double alpha, double s, double R, std::size_t n) {
  auto g = build_grid(1.0, R, n);
  auto op = assemble_operator(g, 3, OuterMode::far_field);
  auto Psi = GridFunction::sample(g, [&](double r) { return std::pow(r, -alpha); });
  auto sol = solve_monotone(op, Psi, NonlinearitySpec::power(s));
  record(sol.trace);
  return sol;
}

double exact_quartic(double r) { return 1.0 / r - 0.5 / (r * r); }

Criterion ac1() {
  const auto t0 = std::chrono::steady_clock::now();
  auto error = [](std::size_t n) {
    auto g = build_grid(1.0, 1e4, n);
    auto op = assemble_operator(g, 3);
    auto rhs = GridFunction::sample(g, [](double r) { return std::pow(r, -4.0); });
    const auto w = solve_linear(op, rhs, exact_quartic(1e4));
    double err = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      err = std::max(err, std::abs(w[i] - exact_quartic(g->r(i))) / exact_quartic(g->r(i)));
    }
    return err;
  };
  const double e1 = error(4097);
  const double e2 = error(8193);
  const double ratio = e1 / e2;
  const double t = seconds_since(t0);
  return {e1 < 1e-4 && ratio >= 3.2 && ratio <= 4.8 && t < 1.0,
          fmt("err(4097)=%.3e ratio=%.3f time=%.3fs", e1, ratio, t)};
}

Criterion ac2() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double alpha : {2.5, 3.0, 3.5}) {
    const auto sol = scalar(alpha, 1.0, 1e8, 8001);
    const double p = fit_power(sol.w, default_window(sol.w.grid())).power;
    pass = pass && std::abs(p + (alpha - 2.0) / 2.0) <= 0.05;
    detail += fmt("a=%.1f:%.4f ", alpha, p);
  }
  {
    const auto sol = scalar(4.0, 1.0, 1e8, 8001);
    const auto f = fit_power_log(sol.w, default_window(sol.w.grid()), 1.0);
    pass = pass && std::abs(f.power + 1.0) <= 0.05 && std::abs(f.log_power - 0.5) <= 0.1;
    detail += fmt("a=4:(%.4f,%.4f) ", f.power, f.log_power);
  }
  {
    const auto sol = scalar(6.0, 1.0, 1e8, 8001);
    const auto f = fit_power_log(sol.w, default_window(sol.w.grid()), 1.0);
    pass = pass && std::abs(f.power + 1.0) <= 0.05 && std::abs(f.log_power) <= 0.05;
    detail += fmt("a=6:(%.4f,%.4f) ", f.power, f.log_power);
  }
  const double t = seconds_since(t0);
  return {pass && t < 10.0, detail + fmt("time=%.2fs", t)};
}

Criterion ac3() {
  const double N = 3.0, s = 1.0, alpha = 3.5;
  const double e = (alpha - 2.0) / (1.0 + s);
  const double coef = e * (N - 2.0 - e);
  const double c = std::pow(coef, -1.0 / (1.0 + s));
  const auto sol = scalar(alpha, s, 1e10, 10001);
  const auto f = fit_power(sol.w, {1e5, 1e9});
  const double rel = std::abs(f.amplitude - c) / c;
  return {rel <= 0.02, fmt("amplitude=%.5f oracle=%.5f rel=%.4f", f.amplitude, c, rel)};
}

struct CoupledFit {
  double u = 0.0;
  double v = 0.0;
  double residual = 0.0;
  RegimeVerdict verdict;
};

CoupledFit coupled(const ExponentSet& x, double R, std::size_t n) {
  CoupledOptions o;
  o.lambda_fraction = 0.5;
  const auto sol = solve_system(x, SourceEnvelope::radial(1.0, x.k), build_grid(1.0, R, n), o);
  const auto win = default_window(sol.state.u.grid());
  return {fit_power(sol.state.u, win).power, fit_power(sol.state.v, win).power,
          std::max(sol.state.residual_u, sol.state.residual_v), sol.problem.verdict};
}

Criterion ac4() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (const auto& x : {gm(3, 5, 1, 6, 1, 4), gm(3, 6, 2, 3, 1, 4), gm(3, 4, 1.5, 3, 1, 3.5)}) {
    try {
      const auto c = coupled(x, 1e8, 8001);
      const double pu = c.verdict.u_profile->power;
      const double pv = c.verdict.v_profile->power;
      const bool ok = std::abs(c.u - pu) <= 0.05 && std::abs(c.v - pv) <= 0.05 && c.residual < 1e-8;
      pass = pass && ok;
      detail += c.verdict.matched_condition +
                fmt(":(%.4f,%.4f) vs (%.2f,%.2f) ", c.u, c.v, pu, pv) +
                fmt("res=%.1e ", c.residual);
    } catch (const Error& e) {
      pass = false;
      detail += std::string(e.what()) + " ";
    }
  }
  const double t = seconds_since(t0);
  return {pass && t < 60.0, detail + fmt("time=%.2fs", t)};
}

Criterion ac5() {
  try {
    const auto c = coupled(gm(3, 4, 1.5, 3, 1, 3.5), 1e8, 8001);
    const bool pass = std::abs(c.u + 1.5) <= 0.05 && std::abs(c.v + 1.0) <= 0.05;
    return {pass, fmt("u=%.4f (want -1.5) v=%.4f (want -1) ", c.u, c.v) + "classified " +
                      c.verdict.matched_condition};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

Criterion ac6() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> up(1.1, 10.0), ue(0.1, 5.0), uc(0.1, 10.0),
      ul(-3.0, 3.0);
  std::size_t samples = 0, counterexamples = 0;
  while (samples < 10000) {
    auto x = gm(3, up(rng), ue(rng), ue(rng), ue(rng), 4.0);
    if (!(*x.sigma() < 1.0)) continue;
    double C1 = uc(rng), C2 = uc(rng), C3 = uc(rng), C4 = uc(rng);
    if (C1 > C2) std::swap(C1, C2);
    if (C3 > C4) std::swap(C3, C4);
    SourceEnvelope env{C1, C2, 4.0, C1};
    const double star = constant_schedule(x, env, C3, C4).lambda_star;
    if (!(star > 0.0 && std::isfinite(star))) continue;
    x.lambda = star * std::exp(ul(rng));
    const bool holds = box_inequality_holds(x, env, constant_schedule(x, env, C3, C4));
    if (holds != (x.lambda <= star)) ++counterexamples;
    ++samples;
  }
  return {counterexamples == 0,
          fmt("samples=%.0f counterexamples=%.0f", double(samples), double(counterexamples))};
}

Criterion ac7() {
  const auto x = gm(3, 5, 1, 6, 1, 4);
  bool pass = true;
  std::string detail;
  for (double fraction : {0.5, 0.125}) {
    CoupledOptions o;
    o.lambda_fraction = fraction;
    const auto problem =
        prepare_problem(x, SourceEnvelope::radial(1.0, 4.0), build_grid(1.0, 1e6, 3001), o);
    const auto window = default_window(problem.op.grid());
    auto state = initial_state(problem);
    std::size_t violations = 0;
    for (int it = 0; it < 50; ++it) {
      state = apply_H(state, problem);
      violations += verify_box(state, problem.schedule, *problem.verdict.u_profile,
                               *problem.verdict.v_profile, window)
                        .violations.size();
    }
    pass = pass && violations == 0;
    detail += fmt("lambda*%.3f: violations=%.0f ", fraction, double(violations));
  }
  return {pass, detail};
}

Criterion ac8() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t violations = 0;
  const int instances = 1000;
  for (int t = 0; t < instances; ++t) {
    const double s = 3.0 * u(rng);
    const double beta = 2.5 + 2.5 * u(rng);
    auto g = build_grid(1.0, 1e3, 121);
    auto op = assemble_operator(g, 3, OuterMode::dirichlet);
    std::vector<double> psi2(g->size()), psi1(g->size());
    for (std::size_t i = 0; i < psi1.size(); ++i) {
      const double envelope = std::pow(g->r(i), -beta);
      psi2[i] = (0.1 + u(rng)) * envelope;
      psi1[i] = psi2[i] + u(rng) * envelope;
    }
    MonotoneOptions o;
    o.psi_tail_exponent = beta;
    o.dirichlet = u(rng) < 0.5 ? DirichletData::barrier : DirichletData::zero;
    const auto w1 = solve_monotone(op, GridFunction(g, psi1), NonlinearitySpec::power(s), o);
    const auto w2 = solve_monotone(op, GridFunction(g, psi2), NonlinearitySpec::power(s), o);
    record(w1.trace);
    record(w2.trace);
    for (std::size_t i = 0; i < psi1.size(); ++i) {
      if (w1.w[i] < w2.w[i] * (1.0 - 1e-9)) ++violations;
    }
  }
  return {violations == 0,
          fmt("instances=%.0f violations=%.0f", double(instances), double(violations))};
}

Criterion ac9() {
  return {scalar_runs > 0 && scalar_non_monotone == 0,
          fmt("scalar runs=%.0f non-monotone=%.0f", double(scalar_runs),
              double(scalar_non_monotone))};
}

Criterion ac10() {
  const auto cases = gmext::testing::classifier_cases();
  std::size_t failures = 0;
  for (const auto& c : cases) {
    if (!gmext::testing::check_case(c).empty()) ++failures;
  }
  return {cases.size() >= 40 && failures == 0,
          fmt("cases=%.0f mismatches=%.0f", double(cases.size()), double(failures))};
}

Criterion ac11() {
  const auto report = degeneration_probe(gm(3, 5, 1, 2, 1, 4), {1e2, 1e3, 1e4});
  std::string detail = report.summary() + ";";
  for (const auto& row : report.rows) {
    detail += fmt(" R=%.0e floor=%.4e", row.R, row.normalized_floor);
  }
  return {report.floor_decreasing(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},  {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11}};
  std::FILE* report = std::fopen("acceptance_report.txt", "w");
  auto emit = [&](const std::string& line) {
    std::fputs(line.c_str(), stdout);
    std::fflush(stdout);
    if (report) std::fputs(line.c_str(), report);
  };
  std::size_t passed = 0;
  std::size_t unexpected = 0;
  for (const auto& [name, run] : criteria) {
    Criterion o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = kUnattainable.count(name) > 0;
    emit(name + (o.pass ? " PASS" : " FAIL") + (!o.pass && known ? " (unattainable as stated)" : "") +
         "  " + o.detail + "\n");
    if (o.pass) ++passed;
    else if (!known) ++unexpected;
  }
  emit(std::to_string(passed) + "/" + std::to_string(criteria.size()) + " criteria pass\n");
  if (report) std::fclose(report);
  return unexpected == 0 ? 0 : 1;
}
