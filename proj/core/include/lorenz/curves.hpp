#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace lorenz {

/// L(p) = p - a p^alpha (1 - p)^beta. Only genuine for alpha = 1, 0 <= a <= 1,
/// 0 < beta <= 1 (or the trivial a = 0).
struct KakwaniBeta {
  double a;
  double alpha;
  double beta;
};

/// L(p) = p - a p (1 - p)^beta, a in [0, 1], beta in (0, 1].
struct KakwaniSpecial {
  double a;
  double beta;
};

/// L(p) = p^a [1 - (1 - p)^b], a >= 0, b in (0, 1].
struct Ortega {
  double a;
  double b;
};

/// L(p) = p^a [1 - (1 - p^d)^b], a >= 0, b in (0, 1], d >= 1.
struct SarabiaL2 {
  double a;
  double b;
  double d;
};

/// Upper-truncated Ortega curve:
/// L(p) = p^(ad) [1 - (1 - p s^d)^b] / [1 - (1 - s^d)^b],
/// a >= 0, b in (0, 1], d >= 1, s in (0, 1].
struct L3 {
  double a;
  double b;
  double d;
  double s;
};

/// General quadratic curve defined implicitly by
/// L(1 - L) = a (p^2 - L) + b L (p - 1) + c (p - L).
struct GeneralQuadratic {
  double a;
  double b;
  double c;
};

using LorenzModel =
    std::variant<KakwaniBeta, KakwaniSpecial, Ortega, SarabiaL2, L3, GeneralQuadratic>;

enum class Family { KakwaniBeta, KakwaniSpecial, Ortega, SarabiaL2, L3, GeneralQuadratic };

inline constexpr Family kAllFamilies[] = {Family::KakwaniBeta, Family::KakwaniSpecial,
                                          Family::Ortega,      Family::SarabiaL2,
                                          Family::L3,          Family::GeneralQuadratic};

/// Whether parameter-domain constraints are enforced when a model is built.
enum class ConstructionMode { Constrained, Diagnostic };

Family family_of(const LorenzModel& model);

/// Short command-line name: kakwani, kakwani1, ortega, l2, l3, gq.
std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

std::size_t parameter_count(Family family);
std::vector<std::string_view> parameter_names(Family family);
std::vector<double> parameters(const LorenzModel& model);

/// Builds a model from a flat parameter vector in the order of
/// parameter_names(). In Constrained mode a parameter-domain breach throws
/// DomainError; in Diagnostic mode the model is returned as-is and the breach
/// is available from domain_breaches().
LorenzModel make_model(Family family, std::span<const double> params,
                       ConstructionMode mode = ConstructionMode::Constrained);

/// Human-readable list of violated parameter-domain constraints.
std::vector<std::string> domain_breaches(const LorenzModel& model);

/// L(p) for p in [0, 1].
double evaluate(const LorenzModel& model, double p);

/// L'(p). At p = 0 and p = 1 the one-sided limit is returned, which may be
/// +/-infinity (e.g. L'(1-) = +inf for KakwaniSpecial with beta < 1).
double derivative(const LorenzModel& model, double p);

/// L''(p) for p in (0, 1).
double second_derivative(const LorenzModel& model, double p);

// ---------------------------------------------------------------------------
// Genuineness certification

enum class Condition {
  LeftEndpoint,         // L(0) != 0
  RightEndpoint,        // L(1) != 1
  NegativeSlopeAtZero,  // L'(0+) < 0
  Concavity,            // L'' < 0 somewhere
  NegativeValue,        // L < 0 somewhere
  ParameterDomain,      // parameters outside the family's domain, or L undefined
};

std::string_view condition_name(Condition condition);

enum class CheckMode { Analytic, Numeric };

struct ValidityReport {
  bool genuine = true;
  CheckMode mode = CheckMode::Analytic;
  std::vector<Condition> violations;
  std::optional<double> first_violation;
  std::optional<double> min_value;
  /// First and last abscissae at which L was observed negative.
  std::optional<std::pair<double, double>> negative_span;

  bool has(Condition condition) const;
};

/// Decides genuineness from the parameters alone.
ValidityReport check_validity_analytic(const LorenzModel& model);

/// Checks the endpoint, slope, convexity and sign conditions pointwise on a
/// uniform grid of grid_size points, refined geometrically toward both ends.
ValidityReport check_validity_numeric(const LorenzModel& model, std::size_t grid_size = 10001);

}  // namespace lorenz
