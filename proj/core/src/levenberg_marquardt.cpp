#include "levenberg_marquardt.hpp"

#include <cmath>
#include <limits>

namespace lorenz::detail {
namespace {

bool jacobian(const ResidualFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
              Eigen::MatrixXd& jac) {
  const double base = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::VectorXd xp = x, rp(r0.size()), rm(r0.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = base * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const bool up = f(xp, rp);
    xp[i] = x[i] - h;
    const bool down = f(xp, rm);
    xp[i] = x[i];
    if (up && down) {
      jac.col(i) = (rp - rm) / (2.0 * h);
    } else if (up) {
      jac.col(i) = (rp - r0) / h;
    } else if (down) {
      jac.col(i) = (r0 - rm) / h;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd x0, Eigen::Index m,
                             const LmOptions& options) {
  const Eigen::Index n = x0.size();
  LmResult out;
  out.x = std::move(x0);

  Eigen::VectorXd r(m), r_new(m);
  if (!residuals(out.x, r)) {
    out.cost = std::numeric_limits<double>::infinity();
    return out;
  }
  out.cost = r.squaredNorm();

  Eigen::MatrixXd jac(m, n);
  if (!jacobian(residuals, out.x, r, jac)) return out;
  Eigen::MatrixXd a = jac.transpose() * jac;
  Eigen::VectorXd g = jac.transpose() * r;

  double mu = 1e-3 * std::max(a.diagonal().maxCoeff(), 1e-12);
  double nu = 2.0;

  for (out.iterations = 0; out.iterations < options.max_iterations; ++out.iterations) {
    if (g.lpNorm<Eigen::Infinity>() <= options.gradient_tol || out.cost == 0.0) {
      out.converged = true;
      return out;
    }
    Eigen::VectorXd scale = a.diagonal().cwiseMax(1e-12);
    Eigen::MatrixXd damped = a;
    damped.diagonal() += mu * scale;
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    if (!step.allFinite()) {
      mu *= nu;
      nu *= 2.0;
      continue;
    }
    if (step.norm() <= options.step_tol * (out.x.norm() + options.step_tol)) {
      out.converged = true;
      return out;
    }

    const Eigen::VectorXd x_new = out.x + step;
    const bool ok = residuals(x_new, r_new) && r_new.allFinite();
    const double cost_new = ok ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
    const double predicted = step.dot(mu * scale.cwiseProduct(step) - g);
    const double rho = predicted > 0.0 ? (out.cost - cost_new) / predicted : -1.0;

    if (ok && cost_new < out.cost) {
      out.x = x_new;
      r = r_new;
      out.cost = cost_new;
      if (!jacobian(residuals, out.x, r, jac)) return out;
      a = jac.transpose() * jac;
      g = jac.transpose() * r;
      const double t = 2.0 * rho - 1.0;
      mu *= std::max(1.0 / 3.0, 1.0 - t * t * t);
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (!std::isfinite(mu) || mu > 1e300) return out;
    }
  }
  return out;
}

}  // namespace lorenz::detail
