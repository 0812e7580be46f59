#pragma once

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <vector>

#include "lorenz/estimation.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/montecarlo.hpp"

namespace lorenz::cli {

using Json = nlohmann::ordered_json;

Json number(double v);
Json number(const std::optional<double>& v);

Json model_json(const LorenzModel& model);
Json validity_json(const ValidityReport& report);
Json measures_json(const MeasureSet& set);
/// estimate - reference for every measure with both values.
Json errors_json(const MeasureSet& set, const std::map<Measure, double>& reference);
Json fit_json(const FitResult& fit, ConstructionMode mode);
Json dataset_json(const GroupedDataset& data, const std::map<Measure, double>& reference);
Json simulation_json(const SimSummary& summary);

/// Linear interpolation between order statistics (the common "type 7" rule).
double percentile(std::vector<double> sorted_values, double q);

/// {average, p10, p25, p50, p75, p90}; average of |x| when `absolute_average`.
Json distribution_json(std::vector<double> values, bool absolute_average);

}  // namespace lorenz::cli
