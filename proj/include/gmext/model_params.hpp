#pragma once

// Problem parameters for the steady Gierer-Meinhardt system on the exterior of
// a ball, the existence/nonexistence classifier and the explicit constant
// schedule used by the fixed-point box construction.

#include <optional>
#include <string>
#include <string_view>

namespace gmext {

enum class SystemKind {
  gm,             // -Lu = u^p/v^q + lambda rho,  -Lv = u^m/v^s
  neg_activator,  // -Lu = 1/(u^p v^q) + lambda rho,  -Lv = u^m/v^s
  neg_both,       // -Lu = 1/(u^p v^q) + lambda rho,  -Lv = 1/(u^m v^s)
  mixed,          // -Lu = v^q/u^p + lambda rho,  -Lv = u^m/v^s
};

std::string_view to_string(SystemKind kind) noexcept;
SystemKind system_kind_from_string(std::string_view text);

struct ExponentSet {
  int N = 3;
  double p = 0.0;
  double q = 0.0;
  double m = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  double k = 0.0;
  SystemKind kind = SystemKind::gm;

  /// Throws Error(invalid_argument) when an invariant is broken.
  void validate() const;

  /// m q / ((p - 1)(1 + s)); empty when p <= 1.
  std::optional<double> sigma() const;
};

/// C1 |x|^-k <= rho <= C2 |x|^-k; the concrete source is rho0 r^-k.
struct SourceEnvelope {
  double C1 = 1.0;
  double C2 = 1.0;
  double k = 0.0;
  double rho_amplitude = 1.0;

  static SourceEnvelope radial(double rho0, double k);
  void validate() const;
  double rho(double r) const;
};

enum class ProfileKind { pure_power, power_log, power_loglog, harmonic_minus_correction };

std::string_view to_string(ProfileKind kind) noexcept;

/// r^power * log^log_power(r / r0).
struct AsymptoticProfile {
  ProfileKind kind = ProfileKind::pure_power;
  double power = 0.0;
  double log_power = 0.0;
  double r0 = 1.0;

  static AsymptoticProfile pure(double power, double r0 = 1.0);
  static AsymptoticProfile with_log(double power, double log_power, double r0 = 1.0);

  /// Positive shape function used for barriers and boxes. The log factor is
  /// evaluated as (1 + log(r/r0)) so the profile stays positive on r = r0.
  double shape(double r) const;

  /// d log(shape) / d log r at radius r.
  double local_exponent(double r) const;

  /// "r^-1" or "r^-1*log^0.5(r/r0)".
  std::string describe() const;
};

enum class Outcome {
  nonexistence,
  exists_minimal_growth,
  exists_fast_growth,
  exists_mixed_minimal,
  inconclusive,
};

std::string_view to_string(Outcome outcome) noexcept;

struct RegimeVerdict {
  Outcome outcome = Outcome::inconclusive;
  std::string matched_condition;
  std::optional<AsymptoticProfile> u_profile;
  std::optional<AsymptoticProfile> v_profile;

  bool exists() const noexcept {
    return outcome == Outcome::exists_minimal_growth || outcome == Outcome::exists_fast_growth ||
           outcome == Outcome::exists_mixed_minimal;
  }
};

/// Maps an exponent set to the theorem that decides it. Nonexistence tests run
/// first, then minimal growth (k > N), then faster growth (2 < k < N).
RegimeVerdict classify(const ExponentSet& params, double r0 = 1.0);

/// Inhibitor decay forced by an activator that decays like r^-a.
AsymptoticProfile predicted_v_profile(const ExponentSet& params, const AsymptoticProfile& u_profile);

struct ConstantSchedule {
  double C3 = 0.0;
  double C4 = 0.0;
  double C5 = 0.0;
  double C6 = 0.0;
  double D = 0.0;
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  double lambda_star = 0.0;
  std::optional<double> lambda_star_star;

  /// The lambda threshold that applies to the system kind.
  double threshold() const { return lambda_star_star.value_or(lambda_star); }
};

ConstantSchedule constant_schedule(const ExponentSet& params, const SourceEnvelope& env, double C3,
                                   double C4);

/// The inequality that makes the box invariant:
///   GM:    C4 (E^p F^-q + lambda C2) <= E
///   MIXED: C6 (G^q D^-p + lambda C2) <= E
bool box_inequality_holds(const ExponentSet& params, const SourceEnvelope& env,
                          const ConstantSchedule& schedule);

}  // namespace gmext
