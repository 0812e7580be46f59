#include "lorenz/measures.hpp"

#include <fmt/core.h>

#include <cmath>
#include <limits>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/numerics.hpp"

namespace lorenz {
namespace {

using numerics::integrate;
using numerics::QuadratureSpec;

QuadratureSpec tight_spec() {
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-12;
  return spec;
}

const std::vector<double>& probe_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 12; k >= 4; --k) g.push_back(std::pow(10.0, -k));
    for (int i = 1; i < 512; ++i) g.push_back(i / 512.0);
    for (int k = 4; k <= 12; ++k) g.push_back(1.0 - std::pow(10.0, -k));
    return g;
  }();
  return grid;
}

// Poverty integrals and the headcount root need L >= 0 and a nondecreasing
// quantile function; a model breaking either gives meaningless numbers.
void require_proper_shape(const LorenzModel& model) {
  double prev = -std::numeric_limits<double>::infinity();
  for (double p : probe_grid()) {
    const double v = evaluate(model, p);
    if (!(v >= -1e-12)) {
      throw IllDefinedMeasureError(
          fmt::format("{} curve is negative (L({}) = {})", family_name(family_of(model)), p, v));
    }
    const double d = derivative(model, p);
    if (std::isnan(d) || d < 0.0) {
      throw IllDefinedMeasureError(
          fmt::format("{} curve has negative slope (L'({}) = {})", family_name(family_of(model)), p, d));
    }
    if (d < prev - 1e-9 * std::max(1.0, std::abs(prev))) {
      throw NonMonotoneQuantileError(fmt::format(
          "{} quantile function decreases near p = {}", family_name(family_of(model)), p));
    }
    prev = d;
  }
}

double headcount_unchecked(const LorenzModel& model, const EconomicContext& ctx) {
  const double z = ctx.poverty_line;
  const double bottom = ctx.mean * derivative(model, 0.0);
  if (z <= bottom) return 0.0;
  const double top = ctx.mean * derivative(model, 1.0);
  if (z >= top) return 1.0;
  return numerics::find_root([&](double p) { return ctx.mean * derivative(model, p) - z; },
                             numerics::RootBracket{0.0, 1.0, 1e-14});
}

double fgt1_at(const LorenzModel& model, const EconomicContext& ctx, double h) {
  if (h == 0.0) return 0.0;
  return h - ctx.mean / ctx.poverty_line * evaluate(model, h);
}

double fgt2_at(const LorenzModel& model, const EconomicContext& ctx, double h) {
  if (h == 0.0) return 0.0;
  return integrate(
      [&](double p) {
        const double gap = 1.0 - ctx.mean * derivative(model, p) / ctx.poverty_line;
        return gap * gap;
      },
      0.0, h, tight_spec());
}

double watts_at(const LorenzModel& model, const EconomicContext& ctx, double h) {
  if (h == 0.0) return 0.0;
  const double log_ratio = std::log(ctx.poverty_line / ctx.mean);
  try {
    return integrate([&](double p) { return log_ratio - std::log(derivative(model, p)); }, 0.0, h,
                     tight_spec());
  } catch (const QuadratureError& e) {
    throw DivergenceError(fmt::format("watts: {} (best estimate {}, error bound {})", e.what(),
                                      e.estimate(), e.error_bound()));
  }
}

double special_case_generalized_gini(const KakwaniSpecial& m, double nu) {
  return nu * (nu + 1.0) * m.a / ((m.beta + nu) * (m.beta + nu + 1.0));
}

}  // namespace

void EconomicContext::validate() const {
  if (!(std::isfinite(mean) && mean > 0.0)) {
    throw DomainError(fmt::format("mean income must be positive, got {}", mean));
  }
  if (!(std::isfinite(poverty_line) && poverty_line > 0.0)) {
    throw DomainError(fmt::format("poverty line must be positive, got {}", poverty_line));
  }
}

std::string_view measure_name(Measure measure) {
  switch (measure) {
    case Measure::Headcount: return "headcount";
    case Measure::PovertyGap: return "poverty_gap";
    case Measure::Severity: return "severity";
    case Measure::Watts: return "watts";
    case Measure::Gini: return "gini";
    case Measure::Mld: return "mld";
  }
  return "unknown";
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::ClosedForm: return "closed_form";
    case Method::Quadrature: return "quadrature";
    case Method::RootFinding: return "root_finding";
  }
  return "unknown";
}

double gini_closed(const LorenzModel& model) {
  using numerics::beta_fn;
  if (const auto* m = std::get_if<KakwaniSpecial>(&model)) {
    return 2.0 * m->a / ((m->beta + 1.0) * (m->beta + 2.0));
  }
  if (const auto* m = std::get_if<Ortega>(&model)) {
    return 1.0 - 2.0 / (m->a + 1.0) + 2.0 * beta_fn(m->a + 1.0, m->b + 1.0);
  }
  if (const auto* m = std::get_if<SarabiaL2>(&model)) {
    return 1.0 - 2.0 / (m->a + 1.0) + 2.0 / m->d * beta_fn((m->a + 1.0) / m->d, m->b + 1.0);
  }
  if (const auto* m = std::get_if<L3>(&model)) {
    const double ad1 = m->a * m->d + 1.0;
    const double z = std::pow(m->s, m->d);
    const double f = numerics::hyp2f1(-m->b, ad1, ad1 + 1.0, z);
    const double denom = std::expm1(m->b * std::log1p(-z));  // (1 - z)^b - 1
    return 1.0 - 2.0 * (f - 1.0) / (ad1 * denom);
  }
  throw UnsupportedFamilyError(
      fmt::format("no closed-form Gini for the {} family", family_name(family_of(model))));
}

double gini_numeric(const LorenzModel& model) {
  return 1.0 - 2.0 * integrate([&](double p) { return evaluate(model, p); }, 0.0, 1.0, tight_spec());
}

double gini(const LorenzModel& model) {
  const Family f = family_of(model);
  if (f == Family::KakwaniBeta || f == Family::GeneralQuadratic) return gini_numeric(model);
  return gini_closed(model);
}

double generalized_gini_numeric(const LorenzModel& model, double nu) {
  if (!(nu >= 1.0)) throw DomainError(fmt::format("generalized Gini needs nu >= 1, got {}", nu));
  const double integral = integrate(
      [&](double p) { return std::pow(1.0 - p, nu - 1.0) * evaluate(model, p); }, 0.0, 1.0,
      tight_spec());
  return 1.0 - nu * (nu + 1.0) * integral;
}

double generalized_gini(const LorenzModel& model, double nu) {
  if (!(nu >= 1.0)) throw DomainError(fmt::format("generalized Gini needs nu >= 1, got {}", nu));
  if (const auto* m = std::get_if<KakwaniSpecial>(&model)) return special_case_generalized_gini(*m, nu);
  return generalized_gini_numeric(model, nu);
}

double quantile(const LorenzModel& model, double p, const EconomicContext& ctx) {
  ctx.validate();
  return ctx.mean * derivative(model, p);
}

double headcount(const LorenzModel& model, const EconomicContext& ctx) {
  ctx.validate();
  require_proper_shape(model);
  return headcount_unchecked(model, ctx);
}

double fgt(const LorenzModel& model, const EconomicContext& ctx, int order) {
  if (order < 0 || order > 2) throw DomainError(fmt::format("FGT order must be 0, 1 or 2, got {}", order));
  const double h = headcount(model, ctx);
  if (order == 0) return h;
  if (order == 1) return fgt1_at(model, ctx, h);
  return fgt2_at(model, ctx, h);
}

double watts(const LorenzModel& model, const EconomicContext& ctx) {
  return watts_at(model, ctx, headcount(model, ctx));
}

double mld(const LorenzModel& model) {
  require_proper_shape(model);
  try {
    return -integrate([&](double p) { return std::log(derivative(model, p)); }, 0.0, 1.0,
                      tight_spec());
  } catch (const QuadratureError& e) {
    throw DivergenceError(fmt::format("mld: {} (best estimate {}, error bound {})", e.what(),
                                      -e.estimate(), e.error_bound()));
  }
}

MeasureSet measure_set(const LorenzModel& model, const EconomicContext& ctx) {
  MeasureSet out;
  out.flagged = !check_validity_analytic(model).genuine;

  auto record = [&](Measure m, Method method, auto&& compute) {
    auto& slot = out[m];
    slot.method = method;
    try {
      slot.value = compute();
    } catch (const std::exception& e) {
      slot.value.reset();
      slot.error = e.what();
    }
  };

  std::optional<double> h;
  std::string shape_error;
  try {
    ctx.validate();
    require_proper_shape(model);
    h = headcount_unchecked(model, ctx);
  } catch (const std::exception& e) {
    shape_error = e.what();
  }
  auto poverty = [&](auto&& f) {
    return [&, f]() -> double {
      if (!h) throw IllDefinedMeasureError(shape_error);
      return f(*h);
    };
  };

  const bool interior = h && *h > 0.0 && *h < 1.0;
  record(Measure::Headcount, interior ? Method::RootFinding : Method::ClosedForm,
         poverty([](double v) { return v; }));
  record(Measure::PovertyGap, Method::ClosedForm,
         poverty([&](double v) { return fgt1_at(model, ctx, v); }));
  record(Measure::Severity, Method::Quadrature,
         poverty([&](double v) { return fgt2_at(model, ctx, v); }));
  record(Measure::Watts, Method::Quadrature,
         poverty([&](double v) { return watts_at(model, ctx, v); }));

  const Family f = family_of(model);
  const bool closed = f != Family::KakwaniBeta && f != Family::GeneralQuadratic;
  record(Measure::Gini, closed ? Method::ClosedForm : Method::Quadrature,
         [&] { return gini(model); });
  record(Measure::Mld, Method::Quadrature, [&] { return mld(model); });
  return out;
}

}  // namespace lorenz
