#include "lorenz/numerics.hpp"

#include <fmt/core.h>
#include <math.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "lorenz/errors.hpp"

namespace lorenz::numerics {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct SignedLogGamma {
  double log_abs;
  int sign;
};

SignedLogGamma signed_ln_gamma(double x) {
  int sign = 1;
  const double v = ::lgamma_r(x, &sign);
  return {v, sign};
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

// Gamma(n1) Gamma(n2) / (Gamma(d1) Gamma(d2)); zero when a denominator
// argument sits on a pole. Numerator arguments must not be poles.
double gamma_ratio(double n1, double n2, double d1, double d2) {
  if (is_nonpositive_integer(d1) || is_nonpositive_integer(d2)) return 0.0;
  const auto a = signed_ln_gamma(n1);
  const auto b = signed_ln_gamma(n2);
  const auto c = signed_ln_gamma(d1);
  const auto d = signed_ln_gamma(d2);
  const int sign = a.sign * b.sign * c.sign * d.sign;
  return sign * std::exp(a.log_abs + b.log_abs - c.log_abs - d.log_abs);
}

// Direct Gauss series. The stopping rule bounds the tail geometrically by
// max(|ratio|, |z|), which is valid once the term ratio is increasing toward z.
double gauss_series(double a, double b, double c, double z, long max_terms) {
  double sum = 1.0;
  double term = 1.0;
  int quiet = 0;
  for (long n = 0; n < max_terms; ++n) {
    const double dn = static_cast<double>(n);
    const double ratio = (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    term *= ratio;
    sum += term;
    if (term == 0.0) return sum;
    const double r = std::max(std::abs(ratio), std::abs(z));
    if (r < 1.0) {
      const double tail = std::abs(term) * r / (1.0 - r);
      quiet = tail <= 0.25 * kEps * std::abs(sum) ? quiet + 1 : 0;
      if (quiet >= 2) return sum;
    }
  }
  throw ConvergenceError(
      fmt::format("hyp2f1: series did not converge within {} terms (a={}, b={}, c={}, z={})",
                  max_terms, a, b, c, z));
}

double terminating_series(double a, double b, double c, double z) {
  // The series stops at the first vanishing Pochhammer factor (a)_n or (b)_n.
  double terms = std::numeric_limits<double>::infinity();
  if (is_nonpositive_integer(a)) terms = std::min(terms, -a);
  if (is_nonpositive_integer(b)) terms = std::min(terms, -b);
  double sum = 1.0;
  double term = 1.0;
  for (long n = 0; n < static_cast<long>(terms); ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * z;
    sum += term;
  }
  return sum;
}

double euler_integral(double a, double b, double c, double z) {
  // 2F1(a,b;c;z) = Gamma(c)/(Gamma(b)Gamma(c-b)) * int_0^1 t^(b-1) (1-t)^(c-b-1) (1-zt)^(-a) dt.
  // Split at 1/2 and substitute t = v^(1/b) on the left, 1 - t = w^(1/(c-b)) on
  // the right, which absorbs both endpoint power factors into dv and dw.
  const double e = c - b;
  QuadratureSpec spec;
  spec.abs_tol = 1e-300;
  spec.rel_tol = 1e-13;
  spec.max_depth = 60;
  const double left = integrate(
      [&](double v) {
        const double t = std::pow(v, 1.0 / b);
        return std::exp((e - 1.0) * std::log1p(-t) - a * std::log1p(-z * t));
      },
      0.0, std::pow(0.5, b), spec);
  const double right = integrate(
      [&](double w) {
        const double u = std::pow(w, 1.0 / e);
        return std::exp((b - 1.0) * std::log1p(-u) - a * std::log1p(-z * (1.0 - u)));
      },
      0.0, std::pow(0.5, e), spec);
  return gamma_ratio(c, 1.0, b, e) * (left / b + right / e);
}

// Gauss-Kronrod 21-point nodes and weights (QUADPACK qk21).
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208015726584, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  int depth;

  bool operator<(const Segment& other) const { return error < other.error; }
};

double checked(const std::function<double(double)>& f, double x) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw QuadratureError(fmt::format("integrate: integrand is not finite at x = {}", x),
                          std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::infinity());
  }
  return v;
}

Segment kronrod21(const std::function<double(double)>& f, double lo, double hi, int depth) {
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double abs_half = std::abs(half);

  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  const double fc = checked(f, centre);
  double resg = 0.0;
  double resk = kWgk[10] * fc;
  double resabs = std::abs(resk);
  for (int j = 0; j < 5; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    f1[jtw] = checked(f, centre - dx);
    f2[jtw] = checked(f, centre + dx);
    resg += kWg[j] * (f1[jtw] + f2[jtw]);
    resk += kWgk[jtw] * (f1[jtw] + f2[jtw]);
    resabs += kWgk[jtw] * (std::abs(f1[jtw]) + std::abs(f2[jtw]));
  }
  for (int j = 0; j < 5; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    f1[jtwm1] = checked(f, centre - dx);
    f2[jtwm1] = checked(f, centre + dx);
    resk += kWgk[jtwm1] * (f1[jtwm1] + f2[jtwm1]);
    resabs += kWgk[jtwm1] * (std::abs(f1[jtwm1]) + std::abs(f2[jtwm1]));
  }
  const double reskh = 0.5 * resk;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
  }

  const double value = resk * half;
  resabs *= abs_half;
  resasc *= abs_half;
  double error = std::abs((resk - resg) * half);
  if (resasc != 0.0 && error != 0.0) {
    error = resasc * std::min(1.0, std::pow(200.0 * error / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * resabs, error);
  }
  return {lo, hi, value, error, depth};
}

constexpr std::size_t kMaxSegments = 8192;

// Brent's zeroin on a bracket whose endpoint values are finite and of
// opposite sign.
double zeroin(const std::function<double(double)>& f, double a, double b, double fa, double fb,
              double tol) {
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    fb = f(b);
    if (std::isnan(fb)) throw DomainError(fmt::format("find_root: f({}) is NaN", b));
  }
  throw ConvergenceError("find_root: tolerance not reached within 500 iterations");
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw DomainError("QuadratureSpec: tolerances must be strictly positive");
  }
  if (max_depth < 1) throw DomainError("QuadratureSpec: max_depth must be at least 1");
}

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError(fmt::format("ln_gamma: argument must be positive, got {}", x));
  return signed_ln_gamma(x).log_abs;
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw DomainError(fmt::format("beta_fn: arguments must be positive, got ({}, {})", a, b));
  }
  return std::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
}

double hyp2f1(double a, double b, double c, double z) {
  if (!(z >= 0.0 && z <= 1.0)) throw DomainError(fmt::format("hyp2f1: z = {} outside [0, 1]", z));
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw DomainError("hyp2f1: parameters must be finite");
  }
  if (is_nonpositive_integer(c)) {
    throw DomainError(fmt::format("hyp2f1: c = {} is a nonpositive integer", c));
  }
  if (z == 0.0) return 1.0;

  const double g = c - a - b;
  if (is_nonpositive_integer(a) || is_nonpositive_integer(b)) {
    return terminating_series(a, b, c, z);
  }
  if (z == 1.0) {
    if (!(g > 0.0)) {
      throw DivergenceError(fmt::format("hyp2f1: series diverges at z = 1 when c - a - b = {} <= 0", g));
    }
    return gamma_ratio(c, g, c - a, c - b);
  }
  if (z <= 0.75) return gauss_series(a, b, c, z, 100000);

  const bool near_integer = std::abs(g - std::nearbyint(g)) < 1e-3;
  if (near_integer) {
    if (c > b && b > 0.0) return euler_integral(a, b, c, z);
    if (c > a && a > 0.0) return euler_integral(b, a, c, z);
    return gauss_series(a, b, c, z, 10000000);
  }

  // 1 - z connection formula; both series converge at rate (1 - z) <= 0.25.
  const double w = 1.0 - z;
  const double first = gamma_ratio(c, g, c - a, c - b) * gauss_series(a, b, 1.0 - g, w, 100000);
  const double second = gamma_ratio(c, -g, a, b) * std::pow(w, g) *
                        gauss_series(c - a, c - b, 1.0 + g, w, 100000);
  return first + second;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec) {
  spec.validate();
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("integrate: bounds must be finite");
  if (lo == hi) return 0.0;

  std::priority_queue<Segment> open;
  std::vector<Segment> frozen;
  const Segment root = kronrod21(f, lo, hi, 0);
  double total = root.value;
  double total_error = root.error;
  open.push(root);

  auto target = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };

  while (total_error > target()) {
    if (open.empty() || open.size() + frozen.size() >= kMaxSegments) {
      throw QuadratureError(
          fmt::format("integrate: tolerance not reached on [{}, {}] (estimate {}, error bound {})",
                      lo, hi, total, total_error),
          total, total_error);
    }
    const Segment worst = open.top();
    open.pop();
    if (worst.depth >= spec.max_depth) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Segment left = kronrod21(f, worst.lo, mid, worst.depth + 1);
    const Segment right = kronrod21(f, mid, worst.hi, worst.depth + 1);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    open.push(left);
    open.push(right);
  }

  // Re-add from scratch to shed the drift of the running sums.
  double sum = 0.0;
  for (const auto& s : frozen) sum += s.value;
  while (!open.empty()) {
    sum += open.top().value;
    open.pop();
  }
  return sum;
}

double find_root(const std::function<double(double)>& f, const RootBracket& bracket) {
  double lo = bracket.lo;
  double hi = bracket.hi;
  if (!(lo < hi)) throw DomainError(fmt::format("find_root: empty bracket [{}, {}]", lo, hi));
  if (!(bracket.tol > 0.0)) throw DomainError("find_root: tolerance must be positive");

  double flo = f(lo);
  double fhi = f(hi);
  if (std::isnan(flo) || std::isnan(fhi)) throw DomainError("find_root: f is NaN at a bracket end");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  if (std::signbit(flo) == std::signbit(fhi)) {
    constexpr int kScan = 64;
    double prev_x = lo;
    double prev_f = flo;
    bool found = false;
    for (int i = 1; i <= kScan && !found; ++i) {
      const double x = lo + (hi - lo) * i / kScan;
      const double fx = i == kScan ? fhi : f(x);
      if (fx == 0.0) return x;
      if (!std::isnan(fx) && std::signbit(fx) != std::signbit(prev_f)) {
        lo = prev_x;
        flo = prev_f;
        hi = x;
        fhi = fx;
        found = true;
      }
      prev_x = x;
      prev_f = fx;
    }
    if (!found) {
      throw NoSignChangeError(
          fmt::format("find_root: no sign change on [{}, {}]", bracket.lo, bracket.hi));
    }
  }

  // Shrink by bisection until both endpoint values are finite.
  for (int i = 0; i < 2000 && (!std::isfinite(flo) || !std::isfinite(fhi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::isnan(fm)) throw DomainError(fmt::format("find_root: f({}) is NaN", mid));
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
    if (hi - lo <= bracket.tol) return std::isfinite(flo) ? lo : hi;
  }
  return zeroin(f, lo, hi, flo, fhi, bracket.tol);
}

}  // namespace lorenz::numerics
