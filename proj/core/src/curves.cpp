#include "lorenz/curves.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>

#include "lorenz/errors.hpp"

namespace lorenz {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// (1 - x)^e, exact at x = 1 for every sign of e.
double pow1m(double x, double e) {
  if (e == 0.0) return 1.0;
  return std::exp(e * std::log1p(-x));
}

// 1 - (1 - x)^b without cancellation for small x.
double one_minus_pow1m(double x, double b) { return -std::expm1(b * std::log1p(-x)); }

void require_unit(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(fmt::format("{}: p = {} outside [0, 1]", what, p));
}

void require_interior(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError(fmt::format("{}: p = {} outside (0, 1)", what, p));
}

// Product rule for p^k * g(p) and its first two derivatives.
struct PowerProduct {
  double k;
  double g, g1, g2;

  double value(double p) const { return std::pow(p, k) * g; }
  double first(double p) const { return k * std::pow(p, k - 1.0) * g + std::pow(p, k) * g1; }
  double second(double p) const {
    return k * (k - 1.0) * std::pow(p, k - 2.0) * g + 2.0 * k * std::pow(p, k - 1.0) * g1 +
           std::pow(p, k) * g2;
  }
};

PowerProduct ortega_parts(const Ortega& m, double p) {
  return {m.a, one_minus_pow1m(p, m.b), m.b * pow1m(p, m.b - 1.0),
          -m.b * (m.b - 1.0) * pow1m(p, m.b - 2.0)};
}

PowerProduct l2_parts(const SarabiaL2& m, double p) {
  const double x = std::pow(p, m.d);
  const double h = one_minus_pow1m(x, m.b);
  const double h1 = m.b * m.d * std::pow(p, m.d - 1.0) * pow1m(x, m.b - 1.0);
  const double h2 = m.b * m.d *
                    ((m.d - 1.0) * std::pow(p, m.d - 2.0) * pow1m(x, m.b - 1.0) -
                     (m.b - 1.0) * m.d * std::pow(p, 2.0 * m.d - 2.0) * pow1m(x, m.b - 2.0));
  return {m.a, h, h1, h2};
}

struct L3Parts {
  PowerProduct numerator;
  double denominator;
};

L3Parts l3_parts(const L3& m, double p) {
  const double z = std::pow(m.s, m.d);
  const double k = one_minus_pow1m(z * p, m.b);
  const double k1 = m.b * z * pow1m(z * p, m.b - 1.0);
  const double k2 = -m.b * (m.b - 1.0) * z * z * pow1m(z * p, m.b - 2.0);
  return {{m.a * m.d, k, k1, k2}, one_minus_pow1m(z, m.b)};
}

struct GqTerms {
  double e, m, n;
};

GqTerms gq_terms(const GeneralQuadratic& q) {
  const double e = -(q.a + q.b + q.c + 1.0);
  return {e, q.b * q.b - 4.0 * q.a, 2.0 * q.b * e - 4.0 * q.c};
}

double gq_radicand(const GqTerms& t, double p) {
  const double r = t.m * p * p + t.n * p + t.e * t.e;
  if (r >= 0.0) return r;
  // Rounding residue at a double root (e.g. p = 1 when a + c = 1).
  const double scale = std::abs(t.m) + std::abs(t.n) + t.e * t.e;
  if (r > -64.0 * std::numeric_limits<double>::epsilon() * scale) return 0.0;
  throw DomainError(fmt::format("GQ: negative radicand {} at p = {}", r, p));
}

double kakwani_slope_at_zero(double a, double alpha) {
  if (a == 0.0) return 1.0;
  if (alpha < 1.0) return a > 0.0 ? -kInf : kInf;
  if (alpha == 1.0) return 1.0 - a;
  return 1.0;
}

double kakwani_slope_at_one(double a, double alpha, double beta) {
  if (a == 0.0) return 1.0;
  // L' = 1 - a p^(alpha-1) (1-p)^(beta-1) (alpha - (alpha+beta) p); the last factor -> -beta.
  (void)alpha;
  if (beta < 1.0) return a > 0.0 ? kInf : -kInf;
  if (beta == 1.0) return 1.0 + a;
  return 1.0;
}

// Limit of L' at 0+ for p^k g(p) with g(p) ~ g0 p as p -> 0.
double power_slope_at_zero(double k, double g0) {
  if (k == 0.0) return g0;
  return k > 0.0 ? 0.0 : (g0 > 0.0 ? kInf : -kInf);
}

}  // namespace

Family family_of(const LorenzModel& model) {
  return std::visit(Overloaded{
                        [](const KakwaniBeta&) { return Family::KakwaniBeta; },
                        [](const KakwaniSpecial&) { return Family::KakwaniSpecial; },
                        [](const Ortega&) { return Family::Ortega; },
                        [](const SarabiaL2&) { return Family::SarabiaL2; },
                        [](const L3&) { return Family::L3; },
                        [](const GeneralQuadratic&) { return Family::GeneralQuadratic; },
                    },
                    model);
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::KakwaniBeta: return "kakwani";
    case Family::KakwaniSpecial: return "kakwani1";
    case Family::Ortega: return "ortega";
    case Family::SarabiaL2: return "l2";
    case Family::L3: return "l3";
    case Family::GeneralQuadratic: return "gq";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

std::size_t parameter_count(Family family) { return parameter_names(family).size(); }

std::vector<std::string_view> parameter_names(Family family) {
  switch (family) {
    case Family::KakwaniBeta: return {"a", "alpha", "beta"};
    case Family::KakwaniSpecial: return {"a", "beta"};
    case Family::Ortega: return {"a", "b"};
    case Family::SarabiaL2: return {"a", "b", "d"};
    case Family::L3: return {"a", "b", "d", "s"};
    case Family::GeneralQuadratic: return {"a", "b", "c"};
  }
  return {};
}

std::vector<double> parameters(const LorenzModel& model) {
  return std::visit(Overloaded{
                        [](const KakwaniBeta& m) { return std::vector{m.a, m.alpha, m.beta}; },
                        [](const KakwaniSpecial& m) { return std::vector{m.a, m.beta}; },
                        [](const Ortega& m) { return std::vector{m.a, m.b}; },
                        [](const SarabiaL2& m) { return std::vector{m.a, m.b, m.d}; },
                        [](const L3& m) { return std::vector{m.a, m.b, m.d, m.s}; },
                        [](const GeneralQuadratic& m) { return std::vector{m.a, m.b, m.c}; },
                    },
                    model);
}

LorenzModel make_model(Family family, std::span<const double> params, ConstructionMode mode) {
  if (params.size() != parameter_count(family)) {
    throw DomainError(fmt::format("{} expects {} parameters, got {}", family_name(family),
                                  parameter_count(family), params.size()));
  }
  for (double v : params) {
    if (!std::isfinite(v)) throw DomainError("model parameters must be finite");
  }
  LorenzModel model = [&]() -> LorenzModel {
    switch (family) {
      case Family::KakwaniBeta: return KakwaniBeta{params[0], params[1], params[2]};
      case Family::KakwaniSpecial: return KakwaniSpecial{params[0], params[1]};
      case Family::Ortega: return Ortega{params[0], params[1]};
      case Family::SarabiaL2: return SarabiaL2{params[0], params[1], params[2]};
      case Family::L3: return L3{params[0], params[1], params[2], params[3]};
      case Family::GeneralQuadratic: return GeneralQuadratic{params[0], params[1], params[2]};
    }
    throw DomainError("unknown family");
  }();
  if (mode == ConstructionMode::Constrained) {
    const auto breaches = domain_breaches(model);
    if (!breaches.empty()) {
      std::string joined;
      for (const auto& b : breaches) joined += (joined.empty() ? "" : "; ") + b;
      throw DomainError(fmt::format("{}: {}", family_name(family), joined));
    }
  }
  return model;
}

std::vector<std::string> domain_breaches(const LorenzModel& model) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  std::visit(Overloaded{
                 [&](const KakwaniBeta& m) {
                   need(m.a >= 0.0, "a >= 0");
                   need(m.alpha > 0.0, "alpha > 0");
                   need(m.beta > 0.0, "beta > 0");
                 },
                 [&](const KakwaniSpecial& m) {
                   need(m.a >= 0.0 && m.a <= 1.0, "0 <= a <= 1");
                   need(m.beta > 0.0 && m.beta <= 1.0, "0 < beta <= 1");
                 },
                 [&](const Ortega& m) {
                   need(m.a >= 0.0, "a >= 0");
                   need(m.b > 0.0 && m.b <= 1.0, "0 < b <= 1");
                 },
                 [&](const SarabiaL2& m) {
                   need(m.a >= 0.0, "a >= 0");
                   need(m.b > 0.0 && m.b <= 1.0, "0 < b <= 1");
                   need(m.d >= 1.0, "d >= 1");
                 },
                 [&](const L3& m) {
                   need(m.a >= 0.0, "a >= 0");
                   need(m.b > 0.0 && m.b <= 1.0, "0 < b <= 1");
                   need(m.d >= 1.0, "d >= 1");
                   need(m.s > 0.0 && m.s <= 1.0, "0 < s <= 1");
                 },
                 [&](const GeneralQuadratic&) {},
             },
             model);
  return out;
}

double evaluate(const LorenzModel& model, double p) {
  require_unit(p, "evaluate");
  return std::visit(
      Overloaded{
          [p](const KakwaniBeta& m) {
            return m.a == 0.0 ? p : p - m.a * std::pow(p, m.alpha) * pow1m(p, m.beta);
          },
          [p](const KakwaniSpecial& m) { return m.a == 0.0 ? p : p - m.a * p * pow1m(p, m.beta); },
          [p](const Ortega& m) { return ortega_parts(m, p).value(p); },
          [p](const SarabiaL2& m) { return l2_parts(m, p).value(p); },
          [p](const L3& m) {
            const auto parts = l3_parts(m, p);
            return parts.numerator.value(p) / parts.denominator;
          },
          [p](const GeneralQuadratic& q) {
            const auto t = gq_terms(q);
            return -0.5 * (q.b * p + t.e + std::sqrt(gq_radicand(t, p)));
          },
      },
      model);
}

double derivative(const LorenzModel& model, double p) {
  require_unit(p, "derivative");
  const bool at_zero = p == 0.0;
  const bool at_one = p == 1.0;
  return std::visit(
      Overloaded{
          [&](const KakwaniBeta& m) {
            if (at_zero) return kakwani_slope_at_zero(m.a, m.alpha);
            if (at_one) return kakwani_slope_at_one(m.a, m.alpha, m.beta);
            return 1.0 - m.a * std::pow(p, m.alpha - 1.0) * pow1m(p, m.beta - 1.0) *
                             (m.alpha - (m.alpha + m.beta) * p);
          },
          [&](const KakwaniSpecial& m) {
            if (at_zero) return kakwani_slope_at_zero(m.a, 1.0);
            if (at_one) return kakwani_slope_at_one(m.a, 1.0, m.beta);
            return 1.0 - m.a * pow1m(p, m.beta - 1.0) * (1.0 - p - m.beta * p);
          },
          [&](const Ortega& m) {
            if (at_zero) return power_slope_at_zero(m.a, m.b);
            if (at_one) return m.b < 1.0 ? kInf : (m.b == 1.0 ? m.a + 1.0 : m.a);
            return ortega_parts(m, p).first(p);
          },
          [&](const SarabiaL2& m) {
            if (at_zero) {
              // L ~ b p^(a + d)
              const double k = m.a + m.d - 1.0;
              if (k == 0.0) return m.b;
              return k > 0.0 ? 0.0 : kInf;
            }
            if (at_one) return m.b < 1.0 ? kInf : (m.b == 1.0 ? m.a + m.d : m.a);
            return l2_parts(m, p).first(p);
          },
          [&](const L3& m) {
            const double z = std::pow(m.s, m.d);
            const double big_d = one_minus_pow1m(z, m.b);
            if (at_zero) return power_slope_at_zero(m.a * m.d, m.b * z) / big_d;
            if (at_one) return (m.a * m.d * big_d + m.b * z * pow1m(z, m.b - 1.0)) / big_d;
            const auto parts = l3_parts(m, p);
            return parts.numerator.first(p) / parts.denominator;
          },
          [&](const GeneralQuadratic& q) {
            const auto t = gq_terms(q);
            const double r = gq_radicand(t, p);
            return -0.5 * (q.b + (2.0 * t.m * p + t.n) / (2.0 * std::sqrt(r)));
          },
      },
      model);
}

double second_derivative(const LorenzModel& model, double p) {
  require_interior(p, "second_derivative");
  return std::visit(
      Overloaded{
          [p](const KakwaniBeta& m) {
            const double s = m.alpha + m.beta;
            const double a2 = s - s * s;
            const double a1 = 2.0 * m.alpha * m.beta + 2.0 * m.alpha * m.alpha - 2.0 * m.alpha;
            const double a0 = m.alpha - m.alpha * m.alpha;
            const double u = (a2 * p + a1) * p + a0;
            return m.a * std::pow(p, m.alpha - 2.0) * pow1m(p, m.beta - 2.0) * u;
          },
          [p](const KakwaniSpecial& m) {
            return m.a * m.beta * pow1m(p, m.beta - 2.0) * (2.0 - p - m.beta * p);
          },
          [p](const Ortega& m) { return ortega_parts(m, p).second(p); },
          [p](const SarabiaL2& m) { return l2_parts(m, p).second(p); },
          [p](const L3& m) {
            const auto parts = l3_parts(m, p);
            return parts.numerator.second(p) / parts.denominator;
          },
          [p](const GeneralQuadratic& q) {
            const auto t = gq_terms(q);
            const double r = gq_radicand(t, p);
            return (t.n * t.n - 4.0 * t.m * t.e * t.e) / (8.0 * r * std::sqrt(r));
          },
      },
      model);
}

}  // namespace lorenz
