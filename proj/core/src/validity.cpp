#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "lorenz/curves.hpp"

namespace lorenz {
namespace {

constexpr double kEndpointTol = 1e-10;
constexpr double kSlopeTol = 1e-10;
constexpr double kConvexityTol = 1e-10;
constexpr double kValueTol = 1e-12;

class ReportBuilder {
 public:
  explicit ReportBuilder(CheckMode mode) { report_.mode = mode; }

  void flag(Condition c, std::optional<double> at = std::nullopt) {
    seen_.insert(c);
    if (at && (!report_.first_violation || *at < *report_.first_violation)) {
      report_.first_violation = *at;
    }
  }

  void observe_value(double p, double v) {
    if (!report_.min_value || v < *report_.min_value) report_.min_value = v;
    if (v < -kValueTol) {
      flag(Condition::NegativeValue, p);
      auto& span = report_.negative_span;
      if (!span) span = std::pair{p, p};
      span->first = std::min(span->first, p);
      span->second = std::max(span->second, p);
    }
  }

  ValidityReport finish() {
    report_.violations.assign(seen_.begin(), seen_.end());
    report_.genuine = report_.violations.empty();
    return std::move(report_);
  }

 private:
  ValidityReport report_;
  std::set<Condition> seen_;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void kakwani_conditions(ReportBuilder& r, double a, double alpha, double beta) {
  if (a == 0.0) return;  // L(p) = p
  if (a < 0.0) r.flag(Condition::Concavity);  // L > p somewhere
  if (alpha <= 0.0) r.flag(Condition::LeftEndpoint, 0.0);
  if (beta <= 0.0) r.flag(Condition::RightEndpoint, 1.0);
  if (alpha <= 0.0 || beta <= 0.0) return;
  if (a > 0.0 && alpha < 1.0) {
    r.flag(Condition::NegativeSlopeAtZero, 0.0);
    r.flag(Condition::NegativeValue, 0.0);
  }
  if (alpha > 1.0) r.flag(Condition::Concavity);  // u(0) = alpha - alpha^2 < 0
  if (alpha == 1.0 && a > 1.0) {
    r.flag(Condition::NegativeSlopeAtZero, 0.0);
    r.flag(Condition::NegativeValue, 0.0);
  }
  if (beta > 1.0) r.flag(Condition::Concavity);  // L'' < 0 near p = 1
}

void gq_conditions(ReportBuilder& r, const GeneralQuadratic& q) {
  const double e = -(q.a + q.b + q.c + 1.0);
  const double m = q.b * q.b - 4.0 * q.a;
  const double n = 2.0 * q.b * e - 4.0 * q.c;
  if (!(e < 0.0)) r.flag(Condition::LeftEndpoint, 0.0);
  if (!(q.a + q.c >= 1.0)) r.flag(Condition::RightEndpoint, 1.0);
  if (!(q.c >= 0.0)) r.flag(Condition::NegativeSlopeAtZero, 0.0);
  if (!(n * n - 4.0 * m * e * e >= 0.0)) r.flag(Condition::Concavity);
  // Radicand m p^2 + n p + e^2 must stay positive on (0, 1); it equals e^2 at
  // p = 0 and (a + c - 1)^2 at p = 1, so only an interior vertex can break it.
  if (m > 0.0) {
    const double vertex = -n / (2.0 * m);
    if (vertex > 0.0 && vertex < 1.0 && e * e - n * n / (4.0 * m) < 0.0) {
      r.flag(Condition::ParameterDomain, vertex);
    }
  }
}

}  // namespace

std::string_view condition_name(Condition condition) {
  switch (condition) {
    case Condition::LeftEndpoint: return "left_endpoint";
    case Condition::RightEndpoint: return "right_endpoint";
    case Condition::NegativeSlopeAtZero: return "negative_slope_at_zero";
    case Condition::Concavity: return "concavity";
    case Condition::NegativeValue: return "negative_value";
    case Condition::ParameterDomain: return "parameter_domain";
  }
  return "unknown";
}

bool ValidityReport::has(Condition condition) const {
  return std::find(violations.begin(), violations.end(), condition) != violations.end();
}

ValidityReport check_validity_analytic(const LorenzModel& model) {
  ReportBuilder r(CheckMode::Analytic);
  std::visit(Overloaded{
                 [&](const KakwaniBeta& m) {
                   if (m.a == 0.0) return;
                   if (!domain_breaches(model).empty()) r.flag(Condition::ParameterDomain);
                   kakwani_conditions(r, m.a, m.alpha, m.beta);
                 },
                 [&](const KakwaniSpecial& m) {
                   if (m.a == 0.0) return;
                   if (!domain_breaches(model).empty()) r.flag(Condition::ParameterDomain);
                   kakwani_conditions(r, m.a, 1.0, m.beta);
                 },
                 [&](const GeneralQuadratic& q) { gq_conditions(r, q); },
                 [&](const auto&) {
                   if (!domain_breaches(model).empty()) r.flag(Condition::ParameterDomain);
                 },
             },
             model);
  return r.finish();
}

ValidityReport check_validity_numeric(const LorenzModel& model, std::size_t grid_size) {
  grid_size = std::max<std::size_t>(grid_size, 100);
  ReportBuilder r(CheckMode::Numeric);

  auto safe = [](auto&& fn) -> double {
    try {
      return fn();
    } catch (const std::exception&) {
      return std::nan("");
    }
  };

  const double l0 = safe([&] { return evaluate(model, 0.0); });
  const double l1 = safe([&] { return evaluate(model, 1.0); });
  if (!(std::abs(l0) <= kEndpointTol)) r.flag(Condition::LeftEndpoint, 0.0);
  if (!(std::abs(l1 - 1.0) <= kEndpointTol)) r.flag(Condition::RightEndpoint, 1.0);
  if (std::isfinite(l0)) r.observe_value(0.0, l0);
  if (std::isfinite(l1)) r.observe_value(1.0, l1);

  const double slope0 = safe([&] { return derivative(model, 0.0); });
  if (std::isnan(slope0)) {
    r.flag(Condition::ParameterDomain, 0.0);
  } else if (slope0 < -kSlopeTol) {
    r.flag(Condition::NegativeSlopeAtZero, 0.0);
  }

  std::vector<double> grid;
  grid.reserve(grid_size + 16);
  for (std::size_t i = 1; i + 1 < grid_size; ++i) {
    grid.push_back(static_cast<double>(i) / static_cast<double>(grid_size - 1));
  }
  // Endpoint behaviour is often invisible at the uniform spacing.
  for (int k = 5; k <= 12; ++k) {
    const double h = std::pow(10.0, -k);
    grid.push_back(h);
    grid.push_back(1.0 - h);
  }
  std::sort(grid.begin(), grid.end());

  for (double p : grid) {
    const double v = safe([&] { return evaluate(model, p); });
    if (!std::isfinite(v)) {
      r.flag(Condition::ParameterDomain, p);
      continue;
    }
    r.observe_value(p, v);
    const double curv = safe([&] { return second_derivative(model, p); });
    if (std::isnan(curv)) {
      r.flag(Condition::ParameterDomain, p);
    } else if (curv < -kConvexityTol) {
      r.flag(Condition::Concavity, p);
    }
  }
  return r.finish();
}

}  // namespace lorenz
