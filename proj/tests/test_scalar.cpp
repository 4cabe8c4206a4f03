#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "gmext/asymptotics.hpp"
#include "gmext/error.hpp"
#include "gmext/scalar_solver.hpp"

using namespace gmext;

namespace {

ScalarSolution run(double alpha, double s, double R, std::size_t n, MonotoneOptions options = {}) {
  auto g = build_grid(1.0, R, n);
  auto op = assemble_operator(g, 3, OuterMode::far_field);
  auto Psi = GridFunction::sample(g, [&](double r) { return std::pow(r, -alpha); });
  return solve_monotone(op, Psi, NonlinearitySpec::power(s), options);
}

}  // namespace

TEST_SUITE("scalar_solver") {
  TEST_CASE("nonlinearity") {
    const auto g = NonlinearitySpec::power(2.0);
    CHECK(g.value(2.0) == doctest::Approx(0.25));
    CHECK(g.derivative(2.0) == doctest::Approx(-0.25));
    CHECK(NonlinearitySpec::constant().value(7.0) == 1.0);
    CHECK(NonlinearitySpec::constant().derivative(7.0) == 0.0);
    CHECK_THROWS_AS(NonlinearitySpec::power(-1.0).validate(), Error);
  }

  TEST_CASE("barrier Z closed form") {
    auto g = build_grid(1.0, 1e3, 4001);
    const auto Z = barrier_Z(g, 3, PowerLaw{1.0, 4.0});
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double r = g->r(i);
      const double exact = 1.0 / r - 0.5 / (r * r);
      err = std::max(err, std::abs(Z[i] - exact) / exact);
    }
    CHECK(err < 1e-5);
    const auto zero = barrier_Z(g, 3, PowerLaw{0.0, 4.0});
    CHECK(zero.max() == 0.0);
    try {
      barrier_Z(g, 3, PowerLaw{1.0, 2.0});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::nonintegrable_source);
    }
  }

  TEST_CASE("barrier Z without tail vanishes at R") {
    auto g = build_grid(1.0, 1e3, 401);
    const auto Z = barrier_Z(g, 3, PowerLaw{1.0, 4.0}, false);
    CHECK(Z[g->size() - 1] == doctest::Approx(0.0));
    CHECK(Z[0] > 0.0);
  }

  TEST_CASE("barrier W inversion") {
    auto g = build_grid(1.0, 1e3, 401);
    GridFunction Z(g, std::vector<double>(g->size(), 2.0));
    CHECK(barrier_W(Z, NonlinearitySpec::power(1.0))[5] == doctest::Approx(2.0));
    CHECK(barrier_W(Z, NonlinearitySpec::power(0.0))[5] == doctest::Approx(2.0));
    CHECK(barrier_W(Z, NonlinearitySpec::constant())[5] == doctest::Approx(2.0));
    const auto Zq = GridFunction::sample(g, [](double r) { return 1.0 / r - 0.5 / (r * r); });
    const auto W = barrier_W(Zq, NonlinearitySpec::power(1.0));
    for (std::size_t i = 0; i < g->size(); i += 50) {
      const double r = g->r(i);
      CHECK(W[i] == doctest::Approx(std::sqrt(2.0 / r - 1.0 / (r * r))));
    }
  }

  TEST_CASE("combined tail exponent") {
    const std::vector<double> one{3.0}, beta{5.0};
    CHECK(combined_tail_exponent(one, beta) == doctest::Approx(5.0));
    const std::vector<double> two{1.0, 1.0}, betas{3.0, 4.0};
    CHECK(combined_tail_exponent(two, betas) == doctest::Approx(2.0 + 2.0 / 1.5));
    const std::vector<double> none{0.0};
    CHECK(std::isinf(combined_tail_exponent(none, beta)));
  }

  TEST_CASE("zero source is degenerate") {
    auto g = build_grid(1.0, 1e3, 101);
    auto op = assemble_operator(g, 3, OuterMode::far_field);
    try {
      solve_monotone(op, GridFunction::zeros(g), NonlinearitySpec::power(1.0));
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::degenerate);
    }
  }

  TEST_CASE("power decay law") {
    for (double alpha : {2.5, 3.0, 3.5}) {
      const auto sol = run(alpha, 1.0, 1e8, 8001);
      CHECK(sol.trace.monotone());
      const auto fit = fit_power(sol.w, default_window(sol.w.grid()));
      CHECK(std::abs(fit.power + (alpha - 2.0) / 2.0) < 0.05);
    }
  }

  TEST_CASE("barrier sandwich") {
    const auto sol = run(3.0, 1.0, 1e5, 2001);
    for (std::size_t i = 0; i < sol.w.size(); ++i) {
      CHECK(sol.w[i] >= sol.barriers.lower[i] * (1 - 1e-9));
      CHECK(sol.w[i] <= sol.barriers.upper[i] * (1 + 1e-9));
    }
  }

  TEST_CASE("uniqueness across starting points") {
    MonotoneOptions scaled;
    scaled.start_scale = 1.5;
    const auto a = run(3.5, 1.0, 1e5, 2001);
    const auto b = run(3.5, 1.0, 1e5, 2001, scaled);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.w.size(); ++i) {
      diff = std::max(diff, std::abs(a.w[i] - b.w[i]) / a.w[i]);
    }
    CHECK(diff < 1e-8);
    CHECK(b.trace.monotone());
  }

  TEST_CASE("dirichlet barrier mode stays monotone") {
    auto g = build_grid(1.0, 1e4, 1001);
    auto op = assemble_operator(g, 3, OuterMode::dirichlet);
    auto Psi = GridFunction::sample(g, [](double r) { return std::pow(r, -3.0); });
    for (auto mode : {DirichletData::barrier, DirichletData::zero}) {
      MonotoneOptions o;
      o.dirichlet = mode;
      const auto sol = solve_monotone(op, Psi, NonlinearitySpec::power(2.0), o);
      CHECK(sol.trace.monotone());
      CHECK(sol.w.min() >= 0.0);
    }
  }

  TEST_CASE("plain Picard without acceleration") {
    MonotoneOptions o;
    o.newton_acceleration = false;
    o.max_sweeps = 20000;
    const auto sol = run(4.0, 1.0, 1e3, 301, o);
    const auto ref = run(4.0, 1.0, 1e3, 301);
    CHECK(sol.trace.monotone());
    for (std::size_t i = 0; i < sol.w.size(); i += 30) {
      CHECK(sol.w[i] == doctest::Approx(ref.w[i]).epsilon(1e-6));
    }
  }

  TEST_CASE("sweep budget exhausted") {
    MonotoneOptions o;
    o.newton_acceleration = false;
    o.max_sweeps = 2;
    try {
      run(3.0, 1.0, 1e4, 401, o);
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::no_convergence);
    }
  }

  TEST_CASE("local decay exponent") {
    CHECK(local_decay_exponent(3, 3.0, 1.0, 1.0, 1e6) == doctest::Approx(-0.5));
    CHECK(local_decay_exponent(3, 6.0, 1.0, 1.0, 1e6) == doctest::Approx(-1.0));
    CHECK(local_decay_exponent(3, 4.0, 1.0, 1.0, std::exp(10.0)) == doctest::Approx(-0.95));
  }
}
