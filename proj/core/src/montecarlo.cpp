#include "lorenz/montecarlo.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "lorenz/errors.hpp"

namespace lorenz {
namespace {

constexpr double kClip = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

bool is_genuine(const LorenzModel& model) {
  return check_validity_analytic(model).genuine || check_validity_numeric(model).genuine;
}

Replication run_replication(const LorenzModel& truth, const EconomicContext& ctx,
                            const SimConfig& config, Family family, std::uint64_t index) {
  Replication rep;
  rep.index = index;
  try {
    auto rng = RandomSource::substream(config.seed, index);
    const auto incomes =
        sample_incomes(truth, ctx.mean, static_cast<std::size_t>(config.sample_size), rng);
    const auto data = group_shares(incomes, config.groups);
    rep.sample_mean = *data.mean;
    const auto fit = ewmd_fit(data, family, config.fit);
    rep.params = parameters(fit.model);
    rep.rss = fit.rss;
    rep.measures = measure_set(fit.model, {rep.sample_mean, ctx.poverty_line});
    rep.ok = true;
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

RandomSource RandomSource::substream(std::uint64_t seed, std::uint64_t index) {
  return RandomSource(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

std::uint64_t RandomSource::next() { return engine_(); }

double RandomSource::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_incomes(const LorenzModel& model, double mean, std::size_t n,
                                   RandomSource& rng) {
  if (!(std::isfinite(mean) && mean > 0.0)) {
    throw DomainError(fmt::format("mean income must be positive, got {}", mean));
  }
  std::vector<double> out(n);
  for (auto& x : out) {
    const double p = std::clamp(rng.uniform(), kClip, 1.0 - kClip);
    x = mean * derivative(model, p);
    if (!std::isfinite(x)) {
      throw DomainError(fmt::format("quantile is not finite at p = {}", p));
    }
  }
  return out;
}

GroupedDataset group_shares(std::span<const double> incomes, int groups) {
  if (groups < 2) throw DomainError(fmt::format("need at least 2 groups, got {}", groups));
  const auto n = incomes.size();
  if (n < static_cast<std::size_t>(groups)) {
    throw DataError(fmt::format("{} incomes cannot fill {} groups", n, groups));
  }
  std::vector<double> sorted(incomes.begin(), incomes.end());
  for (double x : sorted) {
    if (!(x >= 0.0 && std::isfinite(x))) throw DataError(fmt::format("invalid income {}", x));
  }
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (!(total > 0.0)) throw DataError("all incomes are zero; income shares are undefined");

  const std::size_t base = n / static_cast<std::size_t>(groups);
  const std::size_t extra = n % static_cast<std::size_t>(groups);
  GroupedDataset out;
  std::size_t count = 0;
  double running = 0.0;
  for (std::size_t g = 0; g + 1 < static_cast<std::size_t>(groups); ++g) {
    const std::size_t size = base + (g < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) running += sorted[count + i];
    count += size;
    out.u.push_back(static_cast<double>(count) / static_cast<double>(n));
    out.s.push_back(running / total);
  }
  out.mean = total / static_cast<double>(n);
  return out;
}

double estimation_error(double estimate, double reference) { return estimate - reference; }

void SimConfig::validate() const {
  if (groups < 2) throw DomainError(fmt::format("need at least 2 groups, got {}", groups));
  if (sample_size < groups) {
    throw DomainError(fmt::format("sample size {} is below the group count {}", sample_size, groups));
  }
  if (replications < 1) throw DomainError("need at least one replication");
  if (threads < 1) throw DomainError("need at least one thread");
  fit.validate();
}

std::array<MeasureStats, 6> summarize(const MeasureSet& truth, std::span<const Replication> reps) {
  std::array<MeasureStats, 6> out;
  for (Measure m : kAllMeasures) {
    auto& st = out[static_cast<std::size_t>(m)];
    st.measure = m;
    st.truth = truth[m].value;
    std::vector<double> values;
    for (const auto& r : reps) {
      if (r.ok && r.measures[m].value) values.push_back(*r.measures[m].value);
    }
    std::sort(values.begin(), values.end());
    st.count = static_cast<int>(values.size());
    if (values.empty()) continue;
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    st.mean_estimate = mean;
    st.se = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    if (st.truth) {
      st.bias = estimation_error(mean, *st.truth);
      st.abs_bias = std::abs(*st.bias);
      double abs_sum = 0.0;
      for (double v : values) abs_sum += std::abs(estimation_error(v, *st.truth));
      st.mean_abs_error = abs_sum / n;
    }
  }
  return out;
}

SimSummary simulate(const LorenzModel& truth, const EconomicContext& ctx, const SimConfig& config) {
  config.validate();
  ctx.validate();
  if (!is_genuine(truth)) {
    throw DomainError(fmt::format("the {} truth model is not a genuine Lorenz curve",
                                  family_name(family_of(truth))));
  }
  SimSummary out;
  out.refit = config.refit.value_or(family_of(truth));
  out.sample_size = config.sample_size;
  out.requested = config.replications;
  out.truth = measure_set(truth, ctx);
  out.replications.resize(static_cast<std::size_t>(config.replications));

  const int workers = std::min(config.threads, config.replications);
  auto work = [&](int worker) {
    for (int r = worker; r < config.replications; r += workers) {
      out.replications[static_cast<std::size_t>(r)] =
          run_replication(truth, ctx, config, out.refit, static_cast<std::uint64_t>(r));
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  for (const auto& r : out.replications) (r.ok ? out.completed : out.dropped)++;
  if (out.dropped * 10 > out.requested) {
    const auto& first = *std::find_if(out.replications.begin(), out.replications.end(),
                                      [](const Replication& r) { return !r.ok; });
    throw ConvergenceError(fmt::format("{} of {} replications failed (first: {})", out.dropped,
                                       out.requested, first.error));
  }
  out.stats = summarize(out.truth, out.replications);
  return out;
}

}  // namespace lorenz
