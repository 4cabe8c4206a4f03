#include "classifier_cases.hpp"
#include "doctest.h"
#include "gmext/error.hpp"
#include "gmext/nonexistence_probe.hpp"

using namespace gmext;
using gmext::testing::gm;

TEST_SUITE("nonexistence_probe") {
  TEST_CASE("integral criterion") {
    CHECK(integral_criterion(2.0));
    CHECK_FALSE(integral_criterion(2.01));
    CHECK(integral_criterion(2.0 * (3 - 2)));
  }

  TEST_CASE("two-dimensional criterion") {
    CHECK(criterion_2d(0.0, 1.0));
    CHECK_FALSE(criterion_2d(2.0, 1.0));
    CHECK(criterion_2d(1.5, 5.0));
    for (double a : {0.0, 1.0, 1.99, 2.0, 2.01, 3.0}) CHECK(criterion_2d(a, 0.0) == integral_criterion(a));
  }

  TEST_CASE("criterion agrees with the classifier") {
    for (int N : {3, 4, 5}) {
      for (double m : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0}) {
        const auto v = classify(gm(N, 9, 1, m, 1, N + 1.0));
        CHECK((v.matched_condition == "Thm2.1(ii)") == integral_criterion(m * (N - 2)));
      }
    }
  }

  TEST_CASE("floor decays for the boundary case") {
    const auto report = degeneration_probe(gm(3, 5, 1, 2, 1, 4), {1e2, 1e3, 1e4});
    CHECK(report.supported);
    REQUIRE(report.rows.size() == 3);
    for (const auto& row : report.rows) CHECK(row.status == "ok");
    CHECK(report.floor_decreasing());
  }

  TEST_CASE("parallel rows match serial rows") {
    ProbeOptions par;
    par.jobs = 3;
    const auto a = degeneration_probe(gm(3, 5, 1, 2, 1, 4), {1e2, 1e3, 1e4});
    const auto b = degeneration_probe(gm(3, 5, 1, 2, 1, 4), {1e2, 1e3, 1e4}, par);
    for (std::size_t j = 0; j < 3; ++j) CHECK(a.rows[j].normalized_floor == b.rows[j].normalized_floor);
  }

  TEST_CASE("negative exponent system") {
    const auto report =
        degeneration_probe(gm(3, 1, 1, 1, 1, 4, SystemKind::neg_both), {1e2, 1e3, 1e4});
    CHECK(report.supported);
    CHECK(report.summary().find("Thm7.1(i)") != std::string::npos);
  }

  TEST_CASE("unsupported tag reported") {
    const auto report = degeneration_probe(gm(3, 2, 1, 6, 1, 4), {1e2, 1e3});
    CHECK_FALSE(report.supported);
    CHECK(report.rows.empty());
  }

  TEST_CASE("existence instance rejected") {
    try {
      degeneration_probe(gm(3, 5, 1, 6, 1, 4), {1e2, 1e3});
      FAIL("expected throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::precondition);
    }
    CHECK_THROWS_AS(degeneration_probe(gm(3, 5, 1, 2, 1, 4), {1e3, 1e2}), Error);
  }
}
