#pragma once

#include <Eigen/Dense>

#include <functional>

namespace lorenz::detail {

/// Fills r with the residuals at x; returns false where they are undefined.
using ResidualFn = std::function<bool(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LmOptions {
  double gradient_tol = 1e-10;
  double step_tol = 1e-12;
  int max_iterations = 500;
};

struct LmResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // sum of squared residuals
  int iterations = 0;
  bool converged = false;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling, Nielsen damping
/// updates and a central-difference Jacobian. The starting point must have
/// defined residuals.
LmResult levenberg_marquardt(const ResidualFn& residuals, Eigen::VectorXd x0, Eigen::Index m,
                             const LmOptions& options);

}  // namespace lorenz::detail
