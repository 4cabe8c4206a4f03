#include "gmext/model_params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gmext/error.hpp"

namespace gmext {

namespace {

// Boundary equalities such as m = s + N/(N-2) are decided with a relative
// tolerance so that decimal input of N/(N-2) fractions lands on the boundary.
constexpr double kEqualityTolerance = 1e-12;

bool approx_eq(double a, double b) {
  return std::abs(a - b) <= kEqualityTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}
bool gt(double a, double b) { return a > b && !approx_eq(a, b); }
bool lt(double a, double b) { return a < b && !approx_eq(a, b); }
bool ge(double a, double b) { return !lt(a, b); }
bool le(double a, double b) { return !gt(a, b); }

RegimeVerdict nonexistence(std::string tag) {
  return RegimeVerdict{Outcome::nonexistence, std::move(tag), std::nullopt, std::nullopt};
}

RegimeVerdict inconclusive(std::string tag) {
  return RegimeVerdict{Outcome::inconclusive, std::move(tag), std::nullopt, std::nullopt};
}

RegimeVerdict classify_gm(const ExponentSet& x, double r0) {
  if (x.N == 2) return nonexistence("Thm2.1(i)");

  const double n = x.N;
  const double ratio = n / (n - 2.0);
  const double two_over = 2.0 / (n - 2.0);

  if (le(x.m, two_over)) return nonexistence("Thm2.1(ii)");
  if (le(x.p, ratio)) return nonexistence("Thm2.1(iii)");

  const auto sigma = x.sigma();
  if (!sigma) throw Error(ErrorCode::sigma_undefined, "sigma requires p > 1");
  if (ge(*sigma, 1.0)) return inconclusive("sigma>=1");

  if (gt(x.k, n)) {
    const auto u = AsymptoticProfile::pure(2.0 - n, r0);
    const double m_edge = x.s + ratio;
    const double p_edge = x.q + ratio;
    if (ge(x.m, m_edge) && gt(x.p, p_edge)) {
      return {Outcome::exists_minimal_growth, "Thm2.2(i)", u, AsymptoticProfile::pure(2.0 - n, r0)};
    }
    if (approx_eq(x.m, m_edge) && approx_eq(x.p, p_edge)) {
      if (gt(x.q, 1.0 + x.s)) {
        return {Outcome::exists_minimal_growth, "Thm2.2(ii)", u,
                AsymptoticProfile::with_log(2.0 - n, 1.0 / (1.0 + x.s), r0)};
      }
      return inconclusive("Thm2.2(ii):q<=1+s");
    }
    if (gt(x.m, two_over) && lt(x.m, m_edge)) {
      const double p_edge3 = x.q / (1.0 + x.s) * (x.m - two_over) + ratio;
      if (gt(x.p, p_edge3)) {
        return {Outcome::exists_minimal_growth, "Thm2.2(iii)", u,
                AsymptoticProfile::pure(-(x.m * (n - 2.0) - 2.0) / (1.0 + x.s), r0)};
      }
      return inconclusive(approx_eq(x.p, p_edge3) ? "Thm2.2(iii):p=boundary" : "Thm2.2:none");
    }
    return inconclusive(approx_eq(x.p, p_edge) ? "Thm2.2(i):p=boundary" : "Thm2.2:none");
  }

  if (approx_eq(x.k, n)) return inconclusive("k=N");
  if (le(x.k, 2.0)) return inconclusive("k<=2");

  // 2 < k < N
  const double a = x.k - 2.0;
  const double m_edge = (n + x.s * (n - 2.0)) / a;
  const auto u = AsymptoticProfile::pure(-a, r0);
  if (ge(x.m, m_edge) && ge(x.p, x.q * (n - 2.0) / a + 1.0 + 2.0 / a)) {
    return {Outcome::exists_fast_growth, "Thm2.3(i)", u, predicted_v_profile(x, u)};
  }
  if (gt(x.m, 2.0 / a) && lt(x.m, m_edge) &&
      ge(x.p, x.q / (1.0 + x.s) * (x.m - 2.0 / a) + 1.0 + 2.0 / a)) {
    return {Outcome::exists_fast_growth, "Thm2.3(ii)", u, predicted_v_profile(x, u)};
  }
  return inconclusive("Thm2.3:none");
}

RegimeVerdict classify_mixed(const ExponentSet& x, double r0) {
  if (x.N == 2) return nonexistence("Thm7.1(ii1)");
  const double n = x.N;
  const double ratio = n / (n - 2.0);
  if (le(std::min(x.q, x.m), 2.0 / (n - 2.0))) return nonexistence("Thm7.1(ii2)");

  if (gt(x.k, n) && gt(x.q, x.p + ratio) && gt(x.m, x.s + ratio)) {
    return {Outcome::exists_mixed_minimal, "Thm7.2", AsymptoticProfile::pure(2.0 - n, r0),
            AsymptoticProfile::pure(2.0 - n, r0)};
  }
  if (approx_eq(x.k, n) || approx_eq(x.q, x.p + ratio) || approx_eq(x.m, x.s + ratio)) {
    return inconclusive("Thm7.2:boundary");
  }
  return inconclusive("Thm7.2:none");
}

}  // namespace

std::string_view to_string(SystemKind kind) noexcept {
  switch (kind) {
    case SystemKind::gm: return "GM";
    case SystemKind::neg_activator: return "NEG_ACTIVATOR";
    case SystemKind::neg_both: return "NEG_BOTH";
    case SystemKind::mixed: return "MIXED";
  }
  return "?";
}

SystemKind system_kind_from_string(std::string_view text) {
  if (text == "GM" || text == "gm") return SystemKind::gm;
  if (text == "NEG_ACTIVATOR" || text == "neg_activator") return SystemKind::neg_activator;
  if (text == "NEG_BOTH" || text == "neg_both") return SystemKind::neg_both;
  if (text == "MIXED" || text == "mixed") return SystemKind::mixed;
  throw Error(ErrorCode::unknown_system_kind, std::string(text));
}

void ExponentSet::validate() const {
  if (N < 2) throw Error(ErrorCode::invalid_argument, "N must be >= 2");
  if (!(p > 0 && q > 0 && m > 0 && s > 0)) {
    throw Error(ErrorCode::invalid_argument, "p, q, m, s must be positive");
  }
  if (!(lambda >= 0)) throw Error(ErrorCode::invalid_argument, "lambda must be >= 0");
  if (!(k > 0)) throw Error(ErrorCode::invalid_argument, "k must be positive");
  if (!std::isfinite(p + q + m + s + lambda + k)) {
    throw Error(ErrorCode::invalid_argument, "non-finite exponent");
  }
}

std::optional<double> ExponentSet::sigma() const {
  if (!(p > 1.0)) return std::nullopt;
  return m * q / ((p - 1.0) * (1.0 + s));
}

SourceEnvelope SourceEnvelope::radial(double rho0, double k) {
  return SourceEnvelope{rho0, rho0, k, rho0};
}

void SourceEnvelope::validate() const {
  if (!(C1 > 0 && C2 >= C1)) throw Error(ErrorCode::invalid_argument, "need C2 >= C1 > 0");
  if (!(k > 0 && rho_amplitude > 0)) {
    throw Error(ErrorCode::invalid_argument, "need k > 0 and rho0 > 0");
  }
}

double SourceEnvelope::rho(double r) const { return rho_amplitude * std::pow(r, -k); }

std::string_view to_string(ProfileKind kind) noexcept {
  switch (kind) {
    case ProfileKind::pure_power: return "PURE_POWER";
    case ProfileKind::power_log: return "POWER_LOG";
    case ProfileKind::power_loglog: return "POWER_LOGLOG";
    case ProfileKind::harmonic_minus_correction: return "HARMONIC_MINUS_CORRECTION";
  }
  return "?";
}

AsymptoticProfile AsymptoticProfile::pure(double power, double r0) {
  return AsymptoticProfile{ProfileKind::pure_power, power, 0.0, r0};
}

AsymptoticProfile AsymptoticProfile::with_log(double power, double log_power, double r0) {
  if (log_power == 0.0) throw Error(ErrorCode::invalid_argument, "POWER_LOG needs log_power != 0");
  return AsymptoticProfile{ProfileKind::power_log, power, log_power, r0};
}

double AsymptoticProfile::shape(double r) const {
  double value = std::pow(r, power);
  if (log_power != 0.0) value *= std::pow(1.0 + std::log(r / r0), log_power);
  return value;
}

double AsymptoticProfile::local_exponent(double r) const {
  if (log_power == 0.0) return power;
  return power + log_power / (1.0 + std::log(r / r0));
}

std::string AsymptoticProfile::describe() const {
  std::ostringstream out;
  out << "r^" << power;
  if (log_power != 0.0) out << "*log^" << log_power << "(r/r0)";
  return out.str();
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::nonexistence: return "NONEXISTENCE";
    case Outcome::exists_minimal_growth: return "EXISTS_MINIMAL_GROWTH";
    case Outcome::exists_fast_growth: return "EXISTS_FAST_GROWTH";
    case Outcome::exists_mixed_minimal: return "EXISTS_MIXED_MINIMAL";
    case Outcome::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

RegimeVerdict classify(const ExponentSet& params, double r0) {
  params.validate();
  switch (params.kind) {
    case SystemKind::gm: return classify_gm(params, r0);
    case SystemKind::mixed: return classify_mixed(params, r0);
    case SystemKind::neg_activator:
    case SystemKind::neg_both: return nonexistence("Thm7.1(i)");
  }
  throw Error(ErrorCode::unknown_system_kind, "unhandled system kind");
}

AsymptoticProfile predicted_v_profile(const ExponentSet& params, const AsymptoticProfile& u_profile) {
  if (u_profile.kind != ProfileKind::pure_power || !(u_profile.power < 0.0)) {
    throw Error(ErrorCode::precondition, "activator profile must be a decaying pure power");
  }
  const double n = params.N;
  const double a = -u_profile.power;
  const double alpha = params.m * a;
  if (le(alpha, 2.0)) {
    throw Error(ErrorCode::no_inhibitor_solution, "a*m <= 2: inhibitor equation has no solution");
  }
  const double edge = (n + params.s * (n - 2.0)) / a;
  if (approx_eq(params.m, edge)) {
    return AsymptoticProfile::with_log(2.0 - n, 1.0 / (1.0 + params.s), u_profile.r0);
  }
  if (params.m < edge) {
    return AsymptoticProfile::pure(-(alpha - 2.0) / (1.0 + params.s), u_profile.r0);
  }
  return AsymptoticProfile::pure(2.0 - n, u_profile.r0);
}

ConstantSchedule constant_schedule(const ExponentSet& params, const SourceEnvelope& env, double C3,
                                   double C4) {
  if (!(C3 > 0.0 && C4 >= C3)) throw Error(ErrorCode::invalid_argument, "need C4 >= C3 > 0");
  const double lambda = params.lambda;
  const double mu = params.m / (1.0 + params.s);
  ConstantSchedule out;
  out.C3 = C3;
  out.C4 = C4;

  switch (params.kind) {
    case SystemKind::gm: {
      const auto sigma = params.sigma();
      if (!sigma) throw Error(ErrorCode::sigma_undefined, "sigma requires p > 1");
      if (!(*sigma < 1.0)) throw Error(ErrorCode::sigma_out_of_range, "sigma >= 1");
      out.C5 = std::pow(env.C1, mu) * std::pow(C3, 1.0 + mu);
      out.C6 = 0.0;
      const double base = std::pow(out.C5, params.q) /
                          (std::pow(2.0 * C4, params.p) * std::pow(env.C2, params.p - 1.0));
      out.lambda_star = std::pow(base, 1.0 / ((params.p - 1.0) * (1.0 - *sigma)));
      out.D = env.C1 * C3 * lambda;
      out.E = 2.0 * env.C2 * C4 * lambda;
      out.F = C3 * std::pow(out.D, mu);
      out.G = C4 * std::pow(out.E, mu);
      return out;
    }
    case SystemKind::mixed: {
      const double expo = mu * params.q - (params.p + 1.0);
      if (approx_eq(mu * params.q, params.p + 1.0)) {
        throw Error(ErrorCode::degenerate_exponent, "mq/(1+s) = p+1");
      }
      // Caller's (C3, C4) are the lower/upper barrier constants of the mixed system.
      out.C5 = C3;
      out.C6 = C4;
      const double base = env.C2 * std::pow(env.C1 * out.C5, params.p) /
                          (std::pow(2.0 * env.C2 * out.C6, mu * params.q) *
                           std::pow(out.C6, params.q));
      out.lambda_star_star = std::pow(base, 1.0 / expo);
      out.lambda_star = *out.lambda_star_star;
      out.D = env.C1 * out.C5 * lambda;
      out.E = 2.0 * env.C2 * out.C6 * lambda;
      out.F = std::pow(out.D, mu) * out.C5;
      out.G = std::pow(out.E, mu) * out.C6;
      return out;
    }
    case SystemKind::neg_activator:
    case SystemKind::neg_both:
      throw Error(ErrorCode::precondition, "no constant schedule for a nonexistence system");
  }
  throw Error(ErrorCode::unknown_system_kind, "unhandled system kind");
}

bool box_inequality_holds(const ExponentSet& params, const SourceEnvelope& env,
                          const ConstantSchedule& c) {
  const double lambda = params.lambda;
  if (!(lambda > 0.0)) return false;
  // lhs / E evaluated in log space from the source constants.
  const double mu = params.m / (1.0 + params.s);
  const double ll = std::log(lambda);
  if (params.kind == SystemKind::mixed) {
    const double lnD = std::log(env.C1 * c.C5) + ll;
    const double lnE = std::log(2.0 * env.C2 * c.C6) + ll;
    const double lnG = std::log(c.C6) + mu * lnE;
    const double a = std::exp(std::log(c.C6) + params.q * lnG - params.p * lnD - lnE);
    const double b = std::exp(std::log(c.C6 * env.C2) + ll - lnE);
    return a + b <= 1.0;
  }
  const double lnD = std::log(env.C1 * c.C3) + ll;
  const double lnE = std::log(2.0 * env.C2 * c.C4) + ll;
  const double lnF = std::log(c.C3) + mu * lnD;
  const double a = std::exp(std::log(c.C4) + params.p * lnE - params.q * lnF - lnE);
  const double b = std::exp(std::log(c.C4 * env.C2) + ll - lnE);
  return a + b <= 1.0;
}

}  // namespace gmext
