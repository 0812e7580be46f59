#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/curves.hpp"

namespace lorenz {

/// Interior Lorenz ordinates (u_j, s_j), j = 1..J-1, of grouped income data.
struct GroupedDataset {
  std::vector<double> u;  // cumulative population shares
  std::vector<double> s;  // cumulative income shares
  std::optional<double> mean;
  std::optional<double> poverty_line;
  std::string id;

  /// Throws DataError naming the first offending point: sizes differ, no
  /// points, values outside (0, 1), u or s not strictly increasing, s_j > u_j.
  void validate() const;

  /// True when every point lies on the equality line.
  bool is_equality() const;
};

struct FitConfig {
  ConstructionMode mode = ConstructionMode::Constrained;
  int multistart = 16;
  double gradient_tol = 1e-10;
  double step_tol = 1e-12;
  int max_iterations = 500;
  std::uint64_t seed = 20240601;

  void validate() const;
};

struct FitResult {
  Family family = Family::Ortega;
  LorenzModel model;
  /// Sum of squared ordinate errors, recomputed on the fitted model.
  double rss = 0.0;
  /// Value of the minimized objective. Equals rss except for the general
  /// quadratic, which is fitted on its implicit form.
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
  ValidityReport validity;
  /// Winning start point and its rss.
  std::vector<double> start;
  double start_rss = 0.0;
  /// Smallest rss over all start points tried.
  double best_start_rss = 0.0;
  /// Equality data: the shape parameters are not identified and a canonical
  /// representative of the equality line is returned.
  bool unidentified = false;
};

/// Per-family outcome of fit_all.
struct FamilyFit {
  Family family;
  std::optional<FitResult> result;
  std::string error;
};

/// sum_j (L(u_j) - s_j)^2.
double rss(const LorenzModel& model, const GroupedDataset& data);

/// Equally weighted minimum-distance fit of one family.
///
/// Constrained mode keeps parameters in their domains by reparameterization;
/// diagnostic mode searches the raw parameters inside a soft box. The general
/// quadratic is fitted by least squares on its implicit form in either mode.
/// Throws DataError on an invalid dataset.
FitResult ewmd_fit(const GroupedDataset& data, Family family, const FitConfig& config = {});

/// Fits KakwaniSpecial, Ortega, SarabiaL2, L3 and GeneralQuadratic in the
/// configured mode plus KakwaniBeta in diagnostic mode, sorted by rss.
/// Failures are recorded per family and sorted last.
std::vector<FamilyFit> fit_all(const GroupedDataset& data, const FitConfig& config = {});

/// Residuals of the implicit form
/// L(1 - L) - [a (p^2 - L) + b L (p - 1) + c (p - L)] at the data points.
std::vector<double> gq_implicit_residuals(const GeneralQuadratic& q, const GroupedDataset& data);

/// Sum of squared implicit residuals.
double gq_implicit_rss(const GeneralQuadratic& q, const GroupedDataset& data);

/// Direct linear least-squares solution of the implicit form.
GeneralQuadratic gq_regression(const GroupedDataset& data);

/// The same objective minimized iteratively with the general optimizer, for
/// cross-checking the regression.
GeneralQuadratic gq_iterative(const GroupedDataset& data, const FitConfig& config = {});

}  // namespace lorenz
