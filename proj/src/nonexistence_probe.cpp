#include "gmext/nonexistence_probe.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "gmext/error.hpp"
#include "gmext/radial.hpp"
#include "gmext/scalar_solver.hpp"

namespace gmext {

bool integral_criterion(double alpha) { return alpha <= 2.0; }

bool criterion_2d(double alpha, double s) { return alpha < 2.0 || (alpha == 2.0 && s == 0.0); }

bool ProbeReport::floor_decreasing() const {
  double previous = std::numeric_limits<double>::infinity();
  std::size_t solved = 0;
  for (const auto& row : rows) {
    if (row.status != "ok") continue;
    if (!(row.normalized_floor < previous)) return false;
    previous = row.normalized_floor;
    ++solved;
  }
  return solved >= 2;
}

std::string ProbeReport::summary() const {
  std::ostringstream out;
  if (!supported) {
    out << matched_condition << ": no scalar obstruction to probe numerically";
    return out.str();
  }
  out << matched_condition << " " << equation << ": normalized floor "
      << (floor_decreasing() ? "decreasing" : "not decreasing") << " across " << rows.size()
      << " truncations (corroboration only)";
  return out.str();
}

namespace {

ProbeRow run_row(const ProbeReport& report, int N, double R, const ProbeOptions& options) {
  ProbeRow row;
  row.R = R;
  const double decades = std::log10(R / options.r0);
  row.nodes = std::max<std::size_t>(
      16, static_cast<std::size_t>(std::ceil(decades * static_cast<double>(options.nodes_per_decade))) + 1);
  try {
    auto grid = build_grid(options.r0, R, row.nodes);
    auto op = assemble_operator(grid, N, OuterMode::dirichlet);
    const double alpha = report.alpha;
    auto Psi = GridFunction::sample(grid, [&](double r) { return std::pow(r, -alpha); });
    MonotoneOptions mono;
    mono.dirichlet = DirichletData::zero;
    const auto sol = solve_monotone(op, Psi, NonlinearitySpec::power(report.s), mono);
    const auto [first, last] = grid->index_range(options.r0, R / 10.0);
    row.floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i <= last; ++i) {
      row.floor = std::min(row.floor, sol.w[i] * std::pow(grid->r(i), N - 2.0));
    }
    for (std::size_t i = 0; i < grid->size(); ++i) {
      row.peak = std::max(row.peak, sol.w[i] * std::pow(grid->r(i), N - 2.0));
    }
    row.normalized_floor = row.floor / row.peak;
    row.status = "ok";
  } catch (const Error& e) {
    row.status = std::string(to_string(e.code()));
  }
  return row;
}

}  // namespace

ProbeReport degeneration_probe(const ExponentSet& params, const std::vector<double>& R_sequence,
                               const ProbeOptions& options) {
  const auto verdict = classify(params, options.r0);
  if (verdict.outcome != Outcome::nonexistence) {
    throw Error(ErrorCode::precondition, "probe needs a NONEXISTENCE verdict, got " +
                                             std::string(to_string(verdict.outcome)) + " " +
                                             verdict.matched_condition);
  }
  for (std::size_t j = 0; j < R_sequence.size(); ++j) {
    if (!(R_sequence[j] > options.r0) || (j > 0 && !(R_sequence[j] > R_sequence[j - 1]))) {
      throw Error(ErrorCode::invalid_argument, "R sequence must increase and exceed r0");
    }
  }

  ProbeReport report;
  report.matched_condition = verdict.matched_condition;
  const double nm2 = params.N - 2.0;
  const auto& tag = verdict.matched_condition;
  if (tag == "Thm2.1(ii)") {
    report.alpha = params.m * nm2;
    report.s = params.s;
    report.supported = true;
  } else if (tag == "Thm7.1(i)") {
    report.alpha = 0.0;
    report.s = params.p;
    report.supported = params.N >= 3;
  } else if (tag == "Thm7.1(ii2)") {
    if (params.m * nm2 <= 2.0 + 1e-12) {
      report.alpha = params.m * nm2;
      report.s = params.s;
    } else {
      report.alpha = params.q * nm2;
      report.s = params.p;
    }
    report.supported = true;
  }
  if (!report.supported) return report;

  std::ostringstream eq;
  eq << "-Lw = r^-" << report.alpha << " w^-" << report.s;
  report.equation = eq.str();

  report.rows.resize(R_sequence.size());
  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  for (std::size_t start = 0; start < R_sequence.size(); start += jobs) {
    std::vector<std::future<ProbeRow>> batch;
    const std::size_t stop = std::min(R_sequence.size(), start + jobs);
    for (std::size_t j = start; j < stop; ++j) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_row,
                                 std::cref(report), params.N, R_sequence[j], std::cref(options)));
    }
    for (std::size_t j = start; j < stop; ++j) report.rows[j] = batch[j - start].get();
  }
  return report;
}

}  // namespace gmext
