#include "gmext/asymptotics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gmext/error.hpp"

namespace gmext {

namespace {

constexpr double kMinDecades = 1.5;

struct Samples {
  std::vector<double> log_r;
  std::vector<double> log_w;
  double r_lo = 0.0;
  double r_hi = 0.0;
};

Samples collect(const GridFunction& w, const Window& window) {
  const auto [lo, hi] = window;
  if (!(lo > 0.0) || !(hi > lo)) throw Error(ErrorCode::invalid_argument, "bad fitting window");
  if (std::log10(hi / lo) < kMinDecades - 1e-12) {
    throw Error(ErrorCode::window_too_narrow,
                "fitting window spans less than 1.5 decades: [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
  }
  const auto [first, last] = w.grid().index_range(lo, hi);
  Samples out;
  for (std::size_t i = first; i <= last; ++i) {
    if (!(w[i] > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "fitted function is not positive at r = " + std::to_string(w.grid().r(i)));
    }
    out.log_r.push_back(std::log(w.grid().r(i)));
    out.log_w.push_back(std::log(w[i]));
  }
  out.r_lo = w.grid().r(first);
  out.r_hi = w.grid().r(last);
  if (out.log_r.size() < 3) throw Error(ErrorCode::window_too_narrow, "fewer than 3 nodes in window");
  return out;
}

double mean(const std::vector<double>& x) {
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

}  // namespace

Window default_window(const RadialGrid& grid) { return {10.0 * grid.r0(), grid.outer() / 10.0}; }

bool window_touches_boundary_layer(const RadialGrid& grid, const Window& window) {
  const auto [lo, hi] = default_window(grid);
  return window.first < lo * (1.0 - 1e-12) || window.second > hi * (1.0 + 1e-12);
}

FitResult fit_power(const GridFunction& w, const Window& window) {
  const auto data = collect(w, window);
  const double mx = mean(data.log_r);
  const double my = mean(data.log_w);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < data.log_r.size(); ++i) {
    const double dx = data.log_r[i] - mx;
    sxx += dx * dx;
    sxy += dx * (data.log_w[i] - my);
  }
  FitResult fit;
  fit.power = sxy / sxx;
  fit.amplitude = std::exp(my - fit.power * mx);
  double ss = 0.0;
  for (std::size_t i = 0; i < data.log_r.size(); ++i) {
    const double e = data.log_w[i] - (my + fit.power * (data.log_r[i] - mx));
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(data.log_r.size()));
  fit.r_lo = data.r_lo;
  fit.r_hi = data.r_hi;
  fit.points = data.log_r.size();
  return fit;
}

FitResult fit_power_log(const GridFunction& w, const Window& window, double r0) {
  if (!(window.first > r0)) {
    throw Error(ErrorCode::invalid_argument, "log fit needs the window to start above r0");
  }
  const auto data = collect(w, window);
  const std::size_t n = data.log_r.size();
  std::vector<double> log_log(n);
  const double log_r0 = std::log(r0);
  for (std::size_t i = 0; i < n; ++i) log_log[i] = std::log(data.log_r[i] - log_r0);

  const double m1 = mean(data.log_r);
  const double m2 = mean(log_log);
  const double my = mean(data.log_w);
  double s11 = 0.0, s12 = 0.0, s22 = 0.0, s1y = 0.0, s2y = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = data.log_r[i] - m1;
    const double b = log_log[i] - m2;
    const double y = data.log_w[i] - my;
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    s1y += a * y;
    s2y += b * y;
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(s22 > 0.0) || det <= 1e-10 * s11 * s22) {
    throw Error(ErrorCode::collinear, "log r and log log r are collinear on the window");
  }
  FitResult fit;
  fit.power = (s22 * s1y - s12 * s2y) / det;
  fit.log_power = (s11 * s2y - s12 * s1y) / det;
  const double intercept = my - fit.power * m1 - fit.log_power * m2;
  fit.amplitude = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = data.log_w[i] - (intercept + fit.power * data.log_r[i] + fit.log_power * log_log[i]);
    ss += e * e;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.r_lo = data.r_lo;
  fit.r_hi = data.r_hi;
  fit.points = n;
  return fit;
}

ProfileVerdict compare_profile(const FitResult& fit, const AsymptoticProfile& predicted,
                               double tol_power, double tol_log) {
  ProfileVerdict verdict;
  verdict.power_error = std::abs(fit.power - predicted.power);
  verdict.log_error = std::abs(fit.log_power - predicted.log_power);
  verdict.pass = verdict.power_error <= tol_power && verdict.log_error <= tol_log;
  return verdict;
}

}  // namespace gmext
