#pragma once

#include <functional>

namespace lorenz::numerics {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 50;

  /// Throws DomainError unless both tolerances are positive and depth >= 1.
  void validate() const;
};

struct RootBracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol = 1e-12;
};

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Complete beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b).
double beta_fn(double a, double b);

/// Gauss hypergeometric function 2F1(a, b; c; z) for real z in [0, 1].
///
/// Uses the Gauss series on [0, 0.75], the 1 - z connection formula above
/// that, and Gauss's summation theorem at z = 1. When c - a - b is within
/// 1e-3 of an integer the connection formula loses accuracy, so the Euler
/// integral is used instead (requires c > b > 0 or c > a > 0).
///
/// Throws DivergenceError at z = 1 when c - a - b <= 0 and ConvergenceError
/// if a series misses its tolerance within the iteration cap.
double hyp2f1(double a, double b, double c, double z);

/// Globally adaptive Gauss-Kronrod (10/21 point) integration of f over
/// [lo, hi]. Nodes are interior to every subinterval, so integrable endpoint
/// singularities such as ln(p) at p = 0 never get evaluated.
///
/// Throws QuadratureError when the requested accuracy cannot be reached within
/// spec.max_depth bisections, and when f returns a non-finite value.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

/// Brent's bracketed root finder. If f(lo) and f(hi) share a sign the bracket
/// is pre-scanned for a sign change. Infinite endpoint values are tolerated.
double find_root(const std::function<double(double)>& f, const RootBracket& bracket);

}  // namespace lorenz::numerics
