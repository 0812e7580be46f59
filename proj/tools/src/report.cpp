#include "report.hpp"

#include <algorithm>
#include <cmath>

namespace lorenz::cli {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

Json model_json(const LorenzModel& model) {
  const Family f = family_of(model);
  Json params = Json::object();
  const auto names = parameter_names(f);
  const auto values = parameters(model);
  for (std::size_t i = 0; i < names.size(); ++i) params[std::string(names[i])] = number(values[i]);
  return {{"family", family_name(f)}, {"params", params}};
}

Json validity_json(const ValidityReport& report) {
  Json violations = Json::array();
  for (Condition c : report.violations) violations.push_back(condition_name(c));
  Json span = nullptr;
  if (report.negative_span) span = Json::array({report.negative_span->first, report.negative_span->second});
  return {{"genuine", report.genuine},
          {"mode", report.mode == CheckMode::Analytic ? "analytic" : "numeric"},
          {"violations", violations},
          {"first_violation", number(report.first_violation)},
          {"min_value", number(report.min_value)},
          {"negative_span", span}};
}

Json measures_json(const MeasureSet& set) {
  Json values = Json::object();
  for (Measure m : kAllMeasures) {
    const auto& v = set[m];
    Json entry = {{"value", number(v.value)}, {"method", method_name(v.method)}};
    if (!v.value) entry["error"] = v.error;
    values[std::string(measure_name(m))] = entry;
  }
  return {{"flagged", set.flagged}, {"values", values}};
}

Json errors_json(const MeasureSet& set, const std::map<Measure, double>& reference) {
  Json out = Json::object();
  for (const auto& [m, ref] : reference) {
    if (set[m].value) out[std::string(measure_name(m))] = number(estimation_error(*set[m].value, ref));
  }
  return out;
}

Json fit_json(const FitResult& fit, ConstructionMode mode) {
  Json j = model_json(fit.model);
  j["mode"] = mode == ConstructionMode::Constrained ? "constrained" : "diagnostic";
  j["rss"] = number(fit.rss);
  j["objective"] = number(fit.objective);
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["unidentified"] = fit.unidentified;
  Json start = Json::array();
  for (double v : fit.start) start.push_back(number(v));
  j["start"] = start;
  j["validity"] = validity_json(fit.validity);
  return j;
}

Json dataset_json(const GroupedDataset& data, const std::map<Measure, double>& reference) {
  Json points = Json::array();
  for (std::size_t i = 0; i < data.u.size(); ++i) points.push_back({{"u", data.u[i]}, {"s", data.s[i]}});
  Json ref = Json::object();
  for (const auto& [m, v] : reference) ref[std::string(measure_name(m))] = number(v);
  return {{"id", data.id},
          {"mean", number(data.mean)},
          {"poverty_line", number(data.poverty_line)},
          {"points", points},
          {"reference", ref}};
}

Json simulation_json(const SimSummary& s) {
  Json stats = Json::object();
  for (Measure m : kAllMeasures) {
    const auto& st = s[m];
    stats[std::string(measure_name(m))] = {{"truth", number(st.truth)},
                                           {"count", st.count},
                                           {"mean_estimate", number(st.mean_estimate)},
                                           {"bias", number(st.bias)},
                                           {"abs_bias", number(st.abs_bias)},
                                           {"mean_abs_error", number(st.mean_abs_error)},
                                           {"se", number(st.se)}};
  }
  return {{"refit", family_name(s.refit)},    {"sample_size", s.sample_size},
          {"replications", s.requested},      {"completed", s.completed},
          {"dropped", s.dropped},             {"truth", measures_json(s.truth)},
          {"stats", stats}};
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Json distribution_json(std::vector<double> values, bool absolute_average) {
  if (values.empty()) {
    return {{"count", 0}, {"average", nullptr}, {"p10", nullptr}, {"p25", nullptr},
            {"p50", nullptr}, {"p75", nullptr}, {"p90", nullptr}};
  }
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += absolute_average ? std::abs(v) : v;
  return {{"count", values.size()},
          {"average", number(sum / static_cast<double>(values.size()))},
          {"p10", number(percentile(values, 0.10))},
          {"p25", number(percentile(values, 0.25))},
          {"p50", number(percentile(values, 0.50))},
          {"p75", number(percentile(values, 0.75))},
          {"p90", number(percentile(values, 0.90))}};
}

}  // namespace lorenz::cli
