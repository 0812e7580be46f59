#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lorenz/curves.hpp"
#include "lorenz/estimation.hpp"
#include "lorenz/measures.hpp"

namespace lorenz {

/// Deterministic uniform source. Substreams for (seed, index) pairs are
/// independent of each other and of the order they are created in.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  static RandomSource substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
};

/// N incomes x_i = mean * L'(p_i), p_i uniform and clipped to [1e-12, 1 - 1e-12].
std::vector<double> sample_incomes(const LorenzModel& model, double mean, std::size_t n,
                                   RandomSource& rng);

/// Sorts the incomes into `groups` equal-count groups (the first N mod J
/// groups get one extra member) and returns the interior Lorenz points with
/// the sample mean. Throws DataError on negative or all-zero incomes.
GroupedDataset group_shares(std::span<const double> incomes, int groups);

/// Signed error estimate - reference.
double estimation_error(double estimate, double reference);

struct SimConfig {
  int sample_size = 500;
  int replications = 1000;
  int groups = 10;
  std::uint64_t seed = 20240601;
  /// Family fitted in each replication; the truth's family when empty.
  std::optional<Family> refit;
  FitConfig fit;
  /// Worker threads. Results do not depend on this.
  int threads = 1;

  /// Throws DomainError unless N >= J >= 2, R >= 1 and threads >= 1.
  void validate() const;
};

struct Replication {
  std::uint64_t index = 0;
  bool ok = false;
  std::string error;
  double sample_mean = 0.0;
  std::vector<double> params;
  double rss = 0.0;
  MeasureSet measures;
};

struct MeasureStats {
  Measure measure = Measure::Gini;
  std::optional<double> truth;
  /// Replications with a value for this measure.
  int count = 0;
  std::optional<double> mean_estimate;
  std::optional<double> bias;
  std::optional<double> abs_bias;
  /// Mean of |estimate - truth| over replications.
  std::optional<double> mean_abs_error;
  /// Sample standard deviation across replications.
  std::optional<double> se;
};

struct SimSummary {
  Family refit = Family::Ortega;
  int sample_size = 0;
  int requested = 0;
  int completed = 0;
  int dropped = 0;
  MeasureSet truth;
  std::array<MeasureStats, 6> stats;
  std::vector<Replication> replications;

  const MeasureStats& operator[](Measure m) const { return stats[static_cast<std::size_t>(m)]; }
};

/// Sample, regroup, refit and measure R times, then summarize bias and SE of
/// every measure against the truth's values at the true mean.
///
/// Replication r uses RandomSource::substream(config.seed, r) and its own
/// sample mean. Failed fits are dropped and counted; throws ConvergenceError
/// if more than 10% are dropped and DomainError if the truth is not genuine.
SimSummary simulate(const LorenzModel& truth, const EconomicContext& ctx, const SimConfig& config);

/// Summary statistics from stored replications, independent of their order.
std::array<MeasureStats, 6> summarize(const MeasureSet& truth, std::span<const Replication> reps);

}  // namespace lorenz
