#include "lorenz_cli/dataset_io.hpp"

#include <fmt/core.h>

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lorenz/errors.hpp"

namespace lorenz::cli {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("{}: cannot open file", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& field, const std::string& where) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty()) {
    throw DataError(fmt::format("{}: '{}' is not a number", where, field));
  }
  return v;
}

bool is_endpoint(double u, double s) { return (u == 0.0 && s == 0.0) || (u == 1.0 && s == 1.0); }

double number_field(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_number()) throw DataError(fmt::format("{}: field '{}' must be a number", where, key));
  return j.get<double>();
}

// Shared by the JSON format and the CSV sidecar.
void read_metadata(const json& doc, DatasetFile& out, const std::string& where) {
  if (!doc.is_object()) throw DataError(fmt::format("{}: expected a JSON object", where));
  if (auto it = doc.find("id"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw DataError(fmt::format("{}: field 'id' must be a string", where));
    out.data.id = it->get<std::string>();
  }
  if (auto it = doc.find("mean"); it != doc.end() && !it->is_null()) {
    out.data.mean = number_field(*it, "mean", where);
  }
  if (auto it = doc.find("poverty_line"); it != doc.end() && !it->is_null()) {
    out.data.poverty_line = number_field(*it, "poverty_line", where);
  }
  if (auto it = doc.find("reference"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw DataError(fmt::format("{}: field 'reference' must be an object", where));
    for (const auto& [key, value] : it->items()) {
      const auto m = parse_measure(key);
      if (!m) throw DataError(fmt::format("{}: reference.{}: unknown measure", where, key));
      out.reference[*m] = number_field(value, "reference." + key, where);
    }
  }
}

}  // namespace

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures) {
    if (measure_name(m) == name) return m;
  }
  return std::nullopt;
}

DatasetFile parse_csv(const std::string& text, const std::string& source) {
  DatasetFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    const auto where = fmt::format("{}:{}", source, lineno);
    const auto comma = row.find(',');
    if (!header) {
      if (row != "cum_pop_share,cum_income_share") {
        throw DataError(fmt::format("{}: expected header 'cum_pop_share,cum_income_share', got '{}'", where, row));
      }
      header = true;
      continue;
    }
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw DataError(fmt::format("{}: expected two comma-separated fields", where));
    }
    const double u = parse_number(trim(row.substr(0, comma)), where + " (cum_pop_share)");
    const double s = parse_number(trim(row.substr(comma + 1)), where + " (cum_income_share)");
    if (is_endpoint(u, s)) continue;
    out.data.u.push_back(u);
    out.data.s.push_back(s);
  }
  if (!header) throw DataError(fmt::format("{}: empty file", source));
  return out;
}

DatasetFile parse_json(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("{}: invalid JSON at byte {}: {}", source, e.byte, e.what()));
  }
  DatasetFile out;
  read_metadata(doc, out, source);
  const auto it = doc.find("points");
  if (it == doc.end() || !it->is_array()) {
    throw DataError(fmt::format("{}: field 'points' must be an array", source));
  }
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& p = (*it)[i];
    const auto where = fmt::format("{}: points[{}]", source, i);
    if (!p.is_object() || !p.contains("u") || !p.contains("s")) {
      throw DataError(fmt::format("{}: expected an object with 'u' and 's'", where));
    }
    const double u = number_field(p["u"], "u", where);
    const double s = number_field(p["s"], "s", where);
    if (is_endpoint(u, s)) continue;
    out.data.u.push_back(u);
    out.data.s.push_back(s);
  }
  return out;
}

DatasetFile read_dataset(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  const auto source = path.string();
  DatasetFile out;
  if (ext == ".csv") {
    out = parse_csv(read_file(path), source);
    auto sidecar = path;
    sidecar.replace_extension(".meta.json");
    if (std::filesystem::exists(sidecar)) {
      try {
        read_metadata(json::parse(read_file(sidecar)), out, sidecar.string());
      } catch (const json::parse_error& e) {
        throw DataError(fmt::format("{}: invalid JSON at byte {}: {}", sidecar.string(), e.byte, e.what()));
      }
    }
  } else if (ext == ".json") {
    out = parse_json(read_file(path), source);
  } else {
    throw DataError(fmt::format("{}: unknown dataset format '{}' (expected .csv or .json)", source, ext));
  }
  if (out.data.id.empty()) out.data.id = path.stem().string();
  out.data.validate();
  return out;
}

std::string to_csv(const GroupedDataset& data) {
  std::string out = "cum_pop_share,cum_income_share\n";
  for (std::size_t j = 0; j < data.u.size(); ++j) {
    out += fmt::format("{:.17g},{:.17g}\n", data.u[j], data.s[j]);
  }
  return out;
}

}  // namespace lorenz::cli
