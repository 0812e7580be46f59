#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lorenz/estimation.hpp"
#include "lorenz/measures.hpp"

namespace lorenz::cli {

/// A dataset file: Lorenz points plus optional reference (survey) values of
/// the measures, used to report estimation errors.
struct DatasetFile {
  GroupedDataset data;
  std::map<Measure, double> reference;
};

/// Reads `.csv` (header cum_pop_share,cum_income_share; optional sidecar
/// `<stem>.meta.json`) or `.json` ({id, mean, poverty_line, points: [{u, s}],
/// reference}). Rows at (0, 0) and (1, 1) are accepted and dropped.
///
/// Throws DataError with the file and line or field of the problem, or naming
/// the offending point when the parsed data break the dataset invariants.
DatasetFile read_dataset(const std::filesystem::path& path);

DatasetFile parse_csv(const std::string& text, const std::string& source);
DatasetFile parse_json(const std::string& text, const std::string& source);

/// CSV with 17 significant digits, readable by parse_csv.
std::string to_csv(const GroupedDataset& data);

/// Known measure names (headcount, ..., mld).
std::optional<Measure> parse_measure(std::string_view name);

}  // namespace lorenz::cli
