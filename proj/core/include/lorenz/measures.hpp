#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "lorenz/curves.hpp"

namespace lorenz {

/// Mean income and poverty line, both in currency units per person-day.
struct EconomicContext {
  double mean = 1.0;
  double poverty_line = 1.0;

  /// Throws DomainError unless both are finite and positive.
  void validate() const;
};

enum class Measure { Headcount, PovertyGap, Severity, Watts, Gini, Mld };

inline constexpr Measure kAllMeasures[] = {Measure::Headcount, Measure::PovertyGap,
                                           Measure::Severity,  Measure::Watts,
                                           Measure::Gini,      Measure::Mld};

/// headcount, poverty_gap, severity, watts, gini, mld.
std::string_view measure_name(Measure measure);

enum class Method { ClosedForm, Quadrature, RootFinding };

std::string_view method_name(Method method);

struct MeasureValue {
  std::optional<double> value;
  Method method = Method::Quadrature;
  /// Why value is missing.
  std::string error;
};

struct MeasureSet {
  std::array<MeasureValue, 6> values;
  /// The model failed the analytic validity check; values are diagnostic.
  bool flagged = false;

  MeasureValue& operator[](Measure m) { return values[static_cast<std::size_t>(m)]; }
  const MeasureValue& operator[](Measure m) const { return values[static_cast<std::size_t>(m)]; }
};

/// Closed-form Gini for KakwaniSpecial, Ortega, SarabiaL2 and L3. Throws
/// UnsupportedFamilyError for KakwaniBeta and GeneralQuadratic.
double gini_closed(const LorenzModel& model);

/// 1 - 2 * int_0^1 L(p) dp.
double gini_numeric(const LorenzModel& model);

/// Closed form where the family has one, quadrature otherwise.
double gini(const LorenzModel& model);

/// G(nu) = 1 - nu (nu + 1) int_0^1 (1 - p)^(nu - 1) L(p) dp, nu >= 1. Closed
/// form for KakwaniSpecial.
double generalized_gini(const LorenzModel& model, double nu);

/// Always by quadrature; used to cross-check the closed forms.
double generalized_gini_numeric(const LorenzModel& model, double nu);

/// Q(p) = mean * L'(p). At p = 0 and 1 the one-sided limits are returned.
double quantile(const LorenzModel& model, double p, const EconomicContext& ctx);

/// Population share below the poverty line: the root of Q(H) = z, clamped to
/// 0 or 1 when z lies outside the support.
///
/// Throws NonMonotoneQuantileError if Q decreases somewhere and
/// IllDefinedMeasureError if L is negative somewhere.
double headcount(const LorenzModel& model, const EconomicContext& ctx);

/// Foster-Greer-Thorbecke index of order 0, 1 or 2.
double fgt(const LorenzModel& model, const EconomicContext& ctx, int order);

/// int_0^H ln(z / Q(p)) dp. Throws DivergenceError if the quadrature fails.
double watts(const LorenzModel& model, const EconomicContext& ctx);

/// Mean log deviation, -int_0^1 ln L'(p) dp. Scale free.
double mld(const LorenzModel& model);

/// All six measures. Failures are recorded per measure, never thrown.
MeasureSet measure_set(const LorenzModel& model, const EconomicContext& ctx);

}  // namespace lorenz
