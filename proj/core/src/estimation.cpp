#include "lorenz/estimation.hpp"

#include <fmt/core.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "levenberg_marquardt.hpp"
#include "lorenz/errors.hpp"

namespace lorenz {
namespace {

constexpr double kShareTol = 1e-12;
constexpr double kUnitFloor = 1e-9;

enum class Kind { NonNegative, UnitClosed, UnitOpen, AtLeastOne, Positive, Free };

struct Bounds {
  double lo, hi;
};

std::vector<Kind> kinds(Family f) {
  switch (f) {
    case Family::KakwaniBeta: return {Kind::NonNegative, Kind::Positive, Kind::Positive};
    case Family::KakwaniSpecial: return {Kind::UnitClosed, Kind::UnitOpen};
    case Family::Ortega: return {Kind::NonNegative, Kind::UnitOpen};
    case Family::SarabiaL2: return {Kind::NonNegative, Kind::UnitOpen, Kind::AtLeastOne};
    case Family::L3:
      return {Kind::NonNegative, Kind::UnitOpen, Kind::AtLeastOne, Kind::UnitOpen};
    case Family::GeneralQuadratic: return {Kind::Free, Kind::Free, Kind::Free};
  }
  return {};
}

// Region sampled by the Latin-hypercube starts.
Bounds start_box(Kind k) {
  switch (k) {
    case Kind::NonNegative: return {0.05, 3.0};
    case Kind::UnitClosed: return {0.05, 0.95};
    case Kind::UnitOpen: return {0.1, 0.95};
    case Kind::AtLeastOne: return {1.05, 4.0};
    case Kind::Positive: return {0.2, 2.5};
    case Kind::Free: return {-2.0, 2.0};
  }
  return {0.0, 1.0};
}

// Soft box for diagnostic searches: residual penalties switch on outside it.
Bounds soft_box(Kind k) {
  switch (k) {
    case Kind::NonNegative: return {-5.0, 50.0};
    case Kind::UnitClosed: return {-2.0, 3.0};
    case Kind::UnitOpen: return {-1.0, 5.0};
    case Kind::AtLeastOne: return {0.05, 50.0};
    case Kind::Positive: return {1e-3, 50.0};
    case Kind::Free: return {-1e3, 1e3};
  }
  return {0.0, 1.0};
}

double to_natural(Kind k, double t) {
  switch (k) {
    case Kind::NonNegative: return t * t;
    case Kind::UnitClosed: return std::pow(std::sin(t), 2);
    case Kind::UnitOpen: return kUnitFloor + (1.0 - kUnitFloor) * std::pow(std::sin(t), 2);
    case Kind::AtLeastOne: return 1.0 + t * t;
    case Kind::Positive: return std::exp(t);
    case Kind::Free: return t;
  }
  return t;
}

double project(Kind k, double x) {
  switch (k) {
    case Kind::NonNegative: return std::max(x, 0.0);
    case Kind::UnitClosed: return std::clamp(x, 0.0, 1.0);
    case Kind::UnitOpen: return std::clamp(x, kUnitFloor, 1.0);
    case Kind::AtLeastOne: return std::max(x, 1.0);
    case Kind::Positive: return std::max(x, std::numeric_limits<double>::min());
    case Kind::Free: return x;
  }
  return x;
}

double to_internal(Kind k, double x) {
  switch (k) {
    case Kind::NonNegative: return std::sqrt(std::max(x, 0.0));
    case Kind::UnitClosed: return std::asin(std::sqrt(std::clamp(x, 0.0, 1.0)));
    case Kind::UnitOpen:
      return std::asin(std::sqrt(std::clamp((x - kUnitFloor) / (1.0 - kUnitFloor), 0.0, 1.0)));
    case Kind::AtLeastOne: return std::sqrt(std::max(x - 1.0, 0.0));
    case Kind::Positive: return std::log(std::max(x, 1e-300));
    case Kind::Free: return x;
  }
  return x;
}

// Ordinate residuals L(u_j) - s_j; false if the model is undefined there.
bool ordinate_residuals(Family family, std::span<const double> params, const GroupedDataset& data,
                        Eigen::VectorXd& r) {
  try {
    const LorenzModel model = make_model(family, params, ConstructionMode::Diagnostic);
    for (std::size_t j = 0; j < data.u.size(); ++j) {
      const double v = evaluate(model, data.u[j]);
      if (!std::isfinite(v)) return false;
      r[static_cast<Eigen::Index>(j)] = v - data.s[j];
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

double trapezoid_gini(const GroupedDataset& data) {
  double area = 0.0, pu = 0.0, ps = 0.0;
  for (std::size_t j = 0; j <= data.u.size(); ++j) {
    const double u = j < data.u.size() ? data.u[j] : 1.0;
    const double s = j < data.s.size() ? data.s[j] : 1.0;
    area += 0.5 * (u - pu) * (s + ps);
    pu = u;
    ps = s;
  }
  return std::clamp(1.0 - 2.0 * area, 0.0, 0.99);
}

LorenzModel canonical_equality(Family f) {
  switch (f) {
    case Family::KakwaniBeta: return KakwaniBeta{0, 1, 1};
    case Family::KakwaniSpecial: return KakwaniSpecial{0, 1};
    case Family::Ortega: return Ortega{0, 1};
    case Family::SarabiaL2: return SarabiaL2{0, 1, 1};
    case Family::L3: return L3{0, 1, 1, 1};
    case Family::GeneralQuadratic: return GeneralQuadratic{0, -1, 1};
  }
  return Ortega{0, 1};
}

// Analytic certificate, backed by the pointwise check when the only complaint
// is a parameter-domain breach (the domains are sufficient, not necessary).
ValidityReport certify(const LorenzModel& model) {
  auto report = check_validity_analytic(model);
  if (!report.genuine && report.violations.size() == 1 &&
      report.violations.front() == Condition::ParameterDomain) {
    return check_validity_numeric(model);
  }
  return report;
}

std::vector<std::vector<double>> warm_starts(const GroupedDataset& data, Family family,
                                             const FitConfig& config) {
  const double g = trapezoid_gini(data);
  switch (family) {
    case Family::KakwaniSpecial: return {{std::clamp(3.0 * g, 0.05, 0.95), 0.9}};
    case Family::Ortega: return {{std::max(0.05, 2.0 * g / (1.0 - g)), 0.9}};
    case Family::SarabiaL2:
    case Family::L3: {
      const auto base = parameters(ewmd_fit(data, Family::Ortega, config).model);
      const double a = base[0], b = base[1];
      if (family == Family::SarabiaL2) return {{a, b, 1.0}, {a, b, 1.5}};
      return {{a, b, 1.0, 1.0}, {a, b, 1.0, 0.9}, {a, b, 1.5, 0.9}};
    }
    case Family::KakwaniBeta: {
      FitConfig inner = config;
      inner.mode = ConstructionMode::Constrained;
      const auto base = parameters(ewmd_fit(data, Family::KakwaniSpecial, inner).model);
      return {{base[0], 1.0, base[1]}, {base[0], 1.2, base[1]}};
    }
    case Family::GeneralQuadratic: return {};
  }
  return {};
}

std::vector<std::vector<double>> latin_hypercube(const std::vector<Kind>& k, int count,
                                                 std::uint64_t seed) {
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(count),
                                       std::vector<double>(k.size()));
  if (count <= 0) return pts;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> strata(static_cast<std::size_t>(count));
  for (std::size_t dim = 0; dim < k.size(); ++dim) {
    std::iota(strata.begin(), strata.end(), 0);
    std::shuffle(strata.begin(), strata.end(), rng);
    const Bounds b = start_box(k[dim]);
    for (int i = 0; i < count; ++i) {
      const double frac = (strata[static_cast<std::size_t>(i)] + unit(rng)) / count;
      pts[static_cast<std::size_t>(i)][dim] = b.lo + frac * (b.hi - b.lo);
    }
  }
  return pts;
}

FitResult fit_gq(const GroupedDataset& data) {
  FitResult out;
  out.family = Family::GeneralQuadratic;
  const GeneralQuadratic q = gq_regression(data);
  out.model = q;
  out.objective = gq_implicit_rss(q, data);
  out.rss = rss(q, data);
  out.converged = true;
  out.start = parameters(q);
  out.start_rss = out.best_start_rss = out.rss;
  out.validity = certify(q);
  return out;
}

// The domain maps are flat at the boundary (sin^2 at 1, t^2 at 0), so optima
// on the boundary are approached slowly. Finish in natural coordinates and
// project back into the domain.
void polish(FitResult& fit, const GroupedDataset& data, const std::vector<Kind>& k,
            const detail::LmOptions& options) {
  const auto m = static_cast<Eigen::Index>(data.u.size());
  const auto x0 = parameters(fit.model);
  Eigen::VectorXd t0 = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
  detail::ResidualFn residuals = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r) {
    return ordinate_residuals(fit.family, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())), data, r);
  };
  const auto lm = detail::levenberg_marquardt(residuals, t0, m, options);
  std::vector<double> x(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) x[i] = project(k[i], lm.x[static_cast<Eigen::Index>(i)]);
  try {
    const LorenzModel model = make_model(fit.family, x, ConstructionMode::Constrained);
    const double value = rss(model, data);
    if (value < fit.rss) {
      fit.model = model;
      fit.rss = fit.objective = value;
      fit.iterations += lm.iterations;
      fit.converged = fit.converged || lm.converged;
    }
  } catch (const Error&) {
  }
}

FitResult fit_iterative(const GroupedDataset& data, Family family, const FitConfig& config) {
  const auto k = kinds(family);
  const std::size_t np = k.size();
  const auto m = static_cast<Eigen::Index>(data.u.size());
  const bool constrained = config.mode == ConstructionMode::Constrained;

  auto natural = [&](const Eigen::VectorXd& t) {
    std::vector<double> x(np);
    for (std::size_t i = 0; i < np; ++i) {
      x[i] = constrained ? to_natural(k[i], t[static_cast<Eigen::Index>(i)])
                         : t[static_cast<Eigen::Index>(i)];
    }
    return x;
  };
  auto internal = [&](const std::vector<double>& x) {
    Eigen::VectorXd t(static_cast<Eigen::Index>(np));
    for (std::size_t i = 0; i < np; ++i) {
      t[static_cast<Eigen::Index>(i)] = constrained ? to_internal(k[i], x[i]) : x[i];
    }
    return t;
  };

  const Eigen::Index rows = constrained ? m : m + static_cast<Eigen::Index>(np);
  detail::ResidualFn residuals = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r) {
    const auto x = natural(t);
    Eigen::VectorXd head(m);
    if (!ordinate_residuals(family, x, data, head)) return false;
    r.head(m) = head;
    if (!constrained) {
      for (std::size_t i = 0; i < np; ++i) {
        const Bounds b = soft_box(k[i]);
        r[m + static_cast<Eigen::Index>(i)] =
            10.0 * (std::max(0.0, x[i] - b.hi) + std::max(0.0, b.lo - x[i]));
      }
    }
    return true;
  };

  auto starts = warm_starts(data, family, config);
  const int extra = std::max(0, config.multistart - static_cast<int>(starts.size()));
  const std::uint64_t seed = config.seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(family) + 1));
  for (auto& p : latin_hypercube(k, extra, seed)) starts.push_back(std::move(p));
  if (config.multistart < static_cast<int>(starts.size())) {
    starts.resize(static_cast<std::size_t>(std::max(config.multistart, 1)));
  }

  detail::LmOptions options{config.gradient_tol, config.step_tol, config.max_iterations};
  std::optional<FitResult> best;
  double best_start = std::numeric_limits<double>::infinity();
  for (const auto& raw : starts) {
    const Eigen::VectorXd t0 = internal(raw);
    const auto x0 = natural(t0);
    Eigen::VectorXd r0(rows);
    if (!residuals(t0, r0)) continue;
    const double start_cost = r0.head(m).squaredNorm();
    best_start = std::min(best_start, start_cost);

    const auto lm = detail::levenberg_marquardt(residuals, t0, rows, options);
    const auto x = natural(lm.x);
    const LorenzModel model = make_model(family, x, ConstructionMode::Diagnostic);
    const double value = rss(model, data);
    if (!best || value < best->rss) {
      FitResult cand;
      cand.family = family;
      cand.model = model;
      cand.rss = value;
      cand.objective = value;
      cand.converged = lm.converged;
      cand.iterations = lm.iterations;
      cand.start = x0;
      cand.start_rss = start_cost;
      best = std::move(cand);
    }
  }
  if (best && constrained) polish(*best, data, k, options);
  if (!best) {
    throw ConvergenceError(
        fmt::format("{}: no start point gives a defined curve", family_name(family)));
  }
  best->best_start_rss = best_start;
  best->validity = certify(best->model);
  return *best;
}

}  // namespace

void GroupedDataset::validate() const {
  const std::string where = id.empty() ? std::string("dataset") : fmt::format("dataset '{}'", id);
  if (u.size() != s.size()) {
    throw DataError(fmt::format("{}: {} population shares but {} income shares", where, u.size(), s.size()));
  }
  if (u.empty()) throw DataError(fmt::format("{}: no interior Lorenz points", where));
  for (std::size_t j = 0; j < u.size(); ++j) {
    const auto point = fmt::format("{} point {} (u={}, s={})", where, j + 1, u[j], s[j]);
    if (!(u[j] > 0.0 && u[j] < 1.0)) throw DataError(point + ": population share outside (0, 1)");
    if (!(s[j] > 0.0 && s[j] < 1.0)) throw DataError(point + ": income share outside (0, 1)");
    if (j > 0 && !(u[j] > u[j - 1])) throw DataError(point + ": population shares not increasing");
    if (j > 0 && !(s[j] > s[j - 1])) throw DataError(point + ": income shares not increasing");
    if (s[j] > u[j] + kShareTol) throw DataError(point + ": income share above the equality line");
  }
  if (mean && !(std::isfinite(*mean) && *mean > 0.0)) {
    throw DataError(fmt::format("{}: mean income must be positive, got {}", where, *mean));
  }
  if (poverty_line && !(std::isfinite(*poverty_line) && *poverty_line > 0.0)) {
    throw DataError(fmt::format("{}: poverty line must be positive, got {}", where, *poverty_line));
  }
}

bool GroupedDataset::is_equality() const {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (std::abs(u[j] - s[j]) > kShareTol) return false;
  }
  return !u.empty();
}

void FitConfig::validate() const {
  if (multistart < 1) throw DomainError("multistart must be at least 1");
  if (!(gradient_tol > 0.0) || !(step_tol > 0.0)) throw DomainError("optimizer tolerances must be positive");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
}

double rss(const LorenzModel& model, const GroupedDataset& data) {
  double sum = 0.0;
  for (std::size_t j = 0; j < data.u.size(); ++j) {
    const double d = evaluate(model, data.u[j]) - data.s[j];
    sum += d * d;
  }
  return sum;
}

FitResult ewmd_fit(const GroupedDataset& data, Family family, const FitConfig& config) {
  data.validate();
  config.validate();
  if (data.is_equality()) {
    FitResult out;
    out.family = family;
    out.model = canonical_equality(family);
    out.rss = out.objective = rss(out.model, data);
    out.converged = true;
    out.start = parameters(out.model);
    out.start_rss = out.best_start_rss = out.rss;
    out.validity = check_validity_analytic(out.model);
    out.unidentified = true;
    return out;
  }
  if (family == Family::GeneralQuadratic) return fit_gq(data);
  return fit_iterative(data, family, config);
}

std::vector<FamilyFit> fit_all(const GroupedDataset& data, const FitConfig& config) {
  data.validate();
  config.validate();
  std::vector<FamilyFit> out;
  for (Family f : {Family::KakwaniSpecial, Family::Ortega, Family::SarabiaL2, Family::L3,
                   Family::GeneralQuadratic, Family::KakwaniBeta}) {
    FitConfig c = config;
    if (f == Family::KakwaniBeta) c.mode = ConstructionMode::Diagnostic;
    FamilyFit fit{f, std::nullopt, {}};
    try {
      fit.result = ewmd_fit(data, f, c);
    } catch (const std::exception& e) {
      fit.error = e.what();
    }
    out.push_back(std::move(fit));
  }
  std::stable_sort(out.begin(), out.end(), [](const FamilyFit& x, const FamilyFit& y) {
    const double rx = x.result ? x.result->rss : std::numeric_limits<double>::infinity();
    const double ry = y.result ? y.result->rss : std::numeric_limits<double>::infinity();
    return rx < ry;
  });
  return out;
}

std::vector<double> gq_implicit_residuals(const GeneralQuadratic& q, const GroupedDataset& data) {
  std::vector<double> r(data.u.size());
  for (std::size_t j = 0; j < r.size(); ++j) {
    const double p = data.u[j], l = data.s[j];
    r[j] = l * (1.0 - l) - (q.a * (p * p - l) + q.b * l * (p - 1.0) + q.c * (p - l));
  }
  return r;
}

double gq_implicit_rss(const GeneralQuadratic& q, const GroupedDataset& data) {
  double sum = 0.0;
  for (double r : gq_implicit_residuals(q, data)) sum += r * r;
  return sum;
}

GeneralQuadratic gq_regression(const GroupedDataset& data) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.u.size());
  if (n < 3) throw DataError("the general quadratic needs at least 3 Lorenz points");
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double p = data.u[static_cast<std::size_t>(j)], l = data.s[static_cast<std::size_t>(j)];
    x(j, 0) = p * p - l;
    x(j, 1) = l * (p - 1.0);
    x(j, 2) = p - l;
    y[j] = l * (1.0 - l);
  }
  // Minimum-norm solution: on data such as s = u^2 the first regressor vanishes
  // and a is not identified.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
  const Eigen::Vector3d beta = cod.solve(y);
  return {beta[0], beta[1], beta[2]};
}

GeneralQuadratic gq_iterative(const GroupedDataset& data, const FitConfig& config) {
  data.validate();
  config.validate();
  const auto m = static_cast<Eigen::Index>(data.u.size());
  detail::ResidualFn residuals = [&](const Eigen::VectorXd& t, Eigen::VectorXd& r) {
    const auto v = gq_implicit_residuals({t[0], t[1], t[2]}, data);
    for (Eigen::Index j = 0; j < m; ++j) r[j] = v[static_cast<std::size_t>(j)];
    return true;
  };
  const auto lm = detail::levenberg_marquardt(residuals, Eigen::Vector3d(0.0, -1.0, 1.0), m,
                                              {config.gradient_tol, config.step_tol,
                                               config.max_iterations});
  if (!lm.converged) throw ConvergenceError("iterative general quadratic fit did not converge");
  return {lm.x[0], lm.x[1], lm.x[2]};
}

}  // namespace lorenz
