#include "lorenz_cli/app.hpp"

#include <fmt/core.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "lorenz/errors.hpp"
#include "lorenz_cli/dataset_io.hpp"
#include "report.hpp"

#ifndef LORENZ_VERSION
#define LORENZ_VERSION "0.0.0"
#endif

namespace lorenz::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr double kDefaultPovertyLine = 3.0;

// Raised inside commands; carries the exit code.
struct Failure {
  int code;
  std::string message;
};

struct Options {
  std::string command;
  std::string model;
  std::string params;
  std::string data;
  std::string dir;
  std::string mode = "constrained";
  std::string out;
  std::string format;
  std::string refit;
  double mean = 0.0;
  double povline = 0.0;
  bool has_mean = false;
  bool has_povline = false;
  std::vector<int> sizes;
  int reps = 1000;
  int groups = 10;
  int points = 101;
  int multistart = 16;
  int threads = 1;
  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";
};

struct Context {
  Options opt;
  std::ostream& err;
  std::vector<std::string> warnings;

  void warn(std::string message) {
    if (std::find(warnings.begin(), warnings.end(), message) != warnings.end()) return;
    err << "warning: " << message << '\n';
    warnings.push_back(std::move(message));
  }
};

ConstructionMode mode_of(const Options& o) {
  return o.mode == "diagnostic" ? ConstructionMode::Diagnostic : ConstructionMode::Constrained;
}

Family family_arg(const std::string& name) {
  const auto f = parse_family(name);
  if (!f) throw Failure{kExitFailure, fmt::format("unknown model '{}'", name)};
  return *f;
}

std::vector<double> parse_params(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (field.empty() || ec != std::errc() || ptr != end) {
      throw Failure{kExitFailure, fmt::format("--params: '{}' is not a number", field)};
    }
    out.push_back(v);
  }
  return out;
}

// --model/--params as a model. Constrained mode refuses out-of-domain values
// with exit code 2.
LorenzModel model_arg(const Options& o) {
  if (o.model.empty() || o.model == "all") {
    throw Failure{kExitFailure, "this command needs a single --model family"};
  }
  if (o.params.empty()) throw Failure{kExitFailure, "--params is required with --model"};
  const Family f = family_arg(o.model);
  const auto values = parse_params(o.params);
  if (values.size() != parameter_count(f)) {
    throw Failure{kExitFailure, fmt::format("{} takes {} parameters, got {}", family_name(f),
                                            parameter_count(f), values.size())};
  }
  try {
    return make_model(f, values, mode_of(o));
  } catch (const DomainError& e) {
    throw Failure{kExitInvalid, e.what()};
  }
}

FitConfig fit_config(const Options& o) {
  FitConfig c;
  c.mode = mode_of(o);
  c.multistart = o.multistart;
  c.seed = o.seed;
  return c;
}

Json base_report(const Context& ctx) {
  const auto& o = ctx.opt;
  char stamp[32] = {};
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  Json config = {{"model", o.model},
                 {"mode", o.mode},
                 {"multistart", o.multistart},
                 {"seed_source", o.seed_source}};
  if (!o.params.empty()) config["params"] = o.params;
  if (!o.data.empty()) config["data"] = o.data;
  if (!o.dir.empty()) config["dir"] = o.dir;
  if (o.has_mean) config["mean"] = o.mean;
  if (o.has_povline) config["poverty_line"] = o.povline;
  return {{"tool", {{"name", "lorenzfit"}, {"version", LORENZ_VERSION}}},
          {"command", o.command},
          {"generated_at", stamp},
          {"seed", o.seed},
          {"config", config}};
}

// Mean from the flag or the dataset; empty if neither gives one.
std::optional<double> resolve_mean(const Options& o, const GroupedDataset* data) {
  if (o.has_mean) return o.mean;
  if (data && data->mean) return data->mean;
  return std::nullopt;
}

double resolve_povline(Context& ctx, const GroupedDataset* data) {
  if (ctx.opt.has_povline) return ctx.opt.povline;
  if (data && data->poverty_line) return *data->poverty_line;
  ctx.warn(fmt::format("no poverty line given; using the default of {:.2f} per day", kDefaultPovertyLine));
  return kDefaultPovertyLine;
}

// Measures of a fitted or given model. Without a mean only the scale-free
// measures are computed.
MeasureSet measures_for(Context& ctx, const LorenzModel& model, const GroupedDataset* data) {
  const auto mean = resolve_mean(ctx.opt, data);
  if (!mean) {
    MeasureSet set = measure_set(model, {1.0, 1.0});
    for (Measure m : {Measure::Headcount, Measure::PovertyGap, Measure::Severity, Measure::Watts}) {
      set[m].value.reset();
      set[m].error = "mean income unknown: pass --mean or add it to the dataset";
    }
    return set;
  }
  return measure_set(model, {*mean, resolve_povline(ctx, data)});
}

void write_output(const Context& ctx, const std::string& text, std::ostream& out) {
  if (ctx.opt.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(ctx.opt.out, std::ios::binary);
  if (!file) throw Failure{kExitFailure, fmt::format("{}: cannot open for writing", ctx.opt.out)};
  file << text;
  if (!file) throw Failure{kExitFailure, fmt::format("{}: write failed", ctx.opt.out)};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void require_json_format(const Options& o) {
  if (!o.format.empty() && o.format != "json") {
    throw Failure{kExitFailure, fmt::format("{} writes JSON only (--format {} is for curve, compare and batch)",
                                            o.command, o.format)};
  }
}

bool diagnostic_family(Family f, const Options& o) {
  return f == Family::KakwaniBeta && o.model == "all";
}

// One dataset through the fitting pipeline; shared by fit, compare and batch.
struct DatasetRun {
  Json fits = Json::array();
  bool any_fit = false;
  bool invalid = false;
};

DatasetRun fit_dataset(Context& ctx, const DatasetFile& file) {
  const auto& o = ctx.opt;
  const FitConfig config = fit_config(o);
  std::vector<FamilyFit> fits;
  if (o.model.empty() || o.model == "all") {
    fits = fit_all(file.data, config);
  } else {
    const Family f = family_arg(o.model);
    FamilyFit one{f, std::nullopt, {}};
    try {
      one.result = ewmd_fit(file.data, f, config);
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      one.error = e.what();
    }
    fits.push_back(std::move(one));
  }
  DatasetRun run;
  for (const auto& f : fits) {
    if (!f.result) {
      run.fits.push_back({{"family", family_name(f.family)}, {"error", f.error}});
      continue;
    }
    run.any_fit = true;
    const auto mode = diagnostic_family(f.family, o) ? ConstructionMode::Diagnostic : config.mode;
    Json j = fit_json(*f.result, mode);
    const MeasureSet set = measures_for(ctx, f.result->model, &file.data);
    j["measures"] = measures_json(set);
    j["errors"] = errors_json(set, file.reference);
    run.fits.push_back(j);
    if (mode == ConstructionMode::Constrained && !f.result->validity.genuine) run.invalid = true;
  }
  return run;
}

DatasetFile load(const std::string& path) {
  if (path.empty()) throw Failure{kExitFailure, "--data is required"};
  return read_dataset(path);
}

int cmd_fit(Context& ctx, std::ostream& out) {
  require_json_format(ctx.opt);
  const auto file = load(ctx.opt.data);
  auto run = fit_dataset(ctx, file);
  Json report = base_report(ctx);
  report["dataset"] = dataset_json(file.data, file.reference);
  report["fits"] = run.fits;
  report["warnings"] = ctx.warnings;
  write_output(ctx, dump(report), out);
  if (!run.any_fit) return kExitFailure;
  return run.invalid ? kExitInvalid : kExitOk;
}

int cmd_compare(Context& ctx, std::ostream& out) {
  ctx.opt.model = "all";
  const auto file = load(ctx.opt.data);
  auto run = fit_dataset(ctx, file);
  if (ctx.opt.format == "csv") {
    std::string text = "family,rss,genuine";
    for (Measure m : kAllMeasures) text += fmt::format(",{}", measure_name(m));
    for (Measure m : kAllMeasures) text += fmt::format(",error_{}", measure_name(m));
    text += "\n";
    for (const auto& f : run.fits) {
      if (f.contains("error")) continue;
      text += fmt::format("{},{:.17g},{}", f["family"].get<std::string>(), f["rss"].get<double>(),
                          f["validity"]["genuine"].get<bool>() ? "true" : "false");
      for (Measure m : kAllMeasures) {
        const auto& v = f["measures"]["values"][std::string(measure_name(m))]["value"];
        text += v.is_null() ? std::string(",") : fmt::format(",{:.17g}", v.get<double>());
      }
      for (Measure m : kAllMeasures) {
        const auto key = std::string(measure_name(m));
        text += f["errors"].contains(key) ? fmt::format(",{:.17g}", f["errors"][key].get<double>())
                                          : std::string(",");
      }
      text += "\n";
    }
    write_output(ctx, text, out);
  } else {
    require_json_format(ctx.opt);
    Json report = base_report(ctx);
    report["dataset"] = dataset_json(file.data, file.reference);
    report["fits"] = run.fits;
    Json ranking = Json::array();
    for (const auto& f : run.fits) {
      if (!f.contains("error")) ranking.push_back(f["family"]);
    }
    report["ranking"] = ranking;
    report["warnings"] = ctx.warnings;
    write_output(ctx, dump(report), out);
  }
  return run.any_fit ? kExitOk : kExitFailure;
}

int cmd_validate(Context& ctx, std::ostream& out) {
  require_json_format(ctx.opt);
  ctx.opt.mode = "diagnostic";  // a report is wanted even for out-of-domain values
  const LorenzModel model = model_arg(ctx.opt);
  const auto analytic = check_validity_analytic(model);
  const auto numeric = check_validity_numeric(model);
  Json report = base_report(ctx);
  report["model"] = model_json(model);
  report["domain_breaches"] = domain_breaches(model);
  report["genuine"] = analytic.genuine && numeric.genuine;
  report["analytic"] = validity_json(analytic);
  report["numeric"] = validity_json(numeric);
  report["warnings"] = ctx.warnings;
  write_output(ctx, dump(report), out);
  return analytic.genuine && numeric.genuine ? kExitOk : kExitInvalid;
}

int cmd_measures(Context& ctx, std::ostream& out) {
  require_json_format(ctx.opt);
  if (!ctx.opt.has_mean) {
    throw Failure{kExitFailure,
                  "measures needs the mean income (--mean): poverty measures are computed from the "
                  "quantile function mean * L'(p)"};
  }
  const LorenzModel model = model_arg(ctx.opt);
  const auto validity = check_validity_analytic(model);
  const MeasureSet set = measures_for(ctx, model, nullptr);
  Json report = base_report(ctx);
  report["model"] = model_json(model);
  report["validity"] = validity_json(validity);
  report["context"] = {{"mean", ctx.opt.mean},
                       {"poverty_line", ctx.opt.has_povline ? ctx.opt.povline : kDefaultPovertyLine}};
  report["measures"] = measures_json(set);
  report["warnings"] = ctx.warnings;
  write_output(ctx, dump(report), out);
  return mode_of(ctx.opt) == ConstructionMode::Constrained && !validity.genuine ? kExitInvalid : kExitOk;
}

int cmd_simulate(Context& ctx, std::ostream& out) {
  require_json_format(ctx.opt);
  if (!ctx.opt.has_mean) {
    throw Failure{kExitFailure,
                  "simulate needs the mean income (--mean) to draw incomes from the quantile function"};
  }
  const LorenzModel truth = model_arg(ctx.opt);
  const double z = resolve_povline(ctx, nullptr);
  const auto sizes = ctx.opt.sizes.empty() ? std::vector<int>{500, 2500, 5000} : ctx.opt.sizes;
  Json sims = Json::array();
  for (int n : sizes) {
    SimConfig c;
    c.sample_size = n;
    c.replications = ctx.opt.reps;
    c.groups = ctx.opt.groups;
    c.seed = ctx.opt.seed;
    c.threads = ctx.opt.threads;
    c.fit = fit_config(ctx.opt);
    if (!ctx.opt.refit.empty()) c.refit = family_arg(ctx.opt.refit);
    try {
      sims.push_back(simulation_json(simulate(truth, {ctx.opt.mean, z}, c)));
    } catch (const DomainError& e) {
      throw Failure{kExitInvalid, e.what()};
    }
  }
  Json report = base_report(ctx);
  report["model"] = model_json(truth);
  report["context"] = {{"mean", ctx.opt.mean}, {"poverty_line", z}};
  report["simulations"] = sims;
  report["warnings"] = ctx.warnings;
  write_output(ctx, dump(report), out);
  return kExitOk;
}

int cmd_curve(Context& ctx, std::ostream& out) {
  const LorenzModel model = model_arg(ctx.opt);
  if (ctx.opt.points < 2) throw Failure{kExitFailure, "--points must be at least 2"};
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < ctx.opt.points; ++i) {
    const double p = i == ctx.opt.points - 1 ? 1.0 : static_cast<double>(i) / (ctx.opt.points - 1);
    pts.emplace_back(p, evaluate(model, p));
  }
  if (ctx.opt.format.empty() || ctx.opt.format == "csv") {
    std::string text = "p,L\n";
    for (const auto& [p, l] : pts) text += fmt::format("{:.17g},{:.17g}\n", p, l);
    write_output(ctx, text, out);
  } else {
    Json curve = Json::array();
    for (const auto& [p, l] : pts) curve.push_back({{"p", p}, {"L", number(l)}});
    Json report = base_report(ctx);
    report["model"] = model_json(model);
    report["curve"] = curve;
    report["warnings"] = ctx.warnings;
    write_output(ctx, dump(report), out);
  }
  return kExitOk;
}

std::vector<fs::path> dataset_files(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Failure{kExitFailure, fmt::format("{}: not a directory", dir)};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    const auto ext = entry.path().extension().string();
    if (name.size() > 10 && name.ends_with(".meta.json")) continue;
    if (ext == ".csv" || ext == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Failure{kExitFailure, fmt::format("{}: no datasets found", dir)};
  return files;
}

int cmd_batch(Context& ctx, std::ostream& out) {
  const std::string dir = ctx.opt.dir.empty() ? ctx.opt.data : ctx.opt.dir;
  if (dir.empty()) throw Failure{kExitFailure, "batch needs --dir"};
  const auto files = dataset_files(dir);

  struct Item {
    Json report;
    std::string error;
    std::vector<std::string> warnings;
  };
  std::vector<Item> items(files.size());
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < files.size(); i += stride) {
      std::ostringstream quiet;
      Context local{ctx.opt, quiet, {}};
      try {
        const auto file = read_dataset(files[i]);
        auto run = fit_dataset(local, file);
        items[i].report = {{"file", files[i].filename().string()},
                           {"dataset", dataset_json(file.data, file.reference)},
                           {"fits", run.fits}};
        if (!run.any_fit) items[i].error = "no family could be fitted";
      } catch (const Failure& f) {
        items[i].error = f.message;
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
      items[i].warnings = local.warnings;
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(ctx.opt.threads, static_cast<int>(files.size()))));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }

  Json reports = Json::array();
  Json failures = Json::array();
  std::map<std::string, std::vector<double>> rss;
  std::map<std::string, std::map<Measure, std::vector<double>>> errors;
  std::vector<std::string> family_order;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (const auto& w : items[i].warnings) {
      const auto tagged = fmt::format("{}: {}", files[i].filename().string(), w);
      if (std::find(ctx.warnings.begin(), ctx.warnings.end(), tagged) == ctx.warnings.end()) {
        ctx.warn(tagged);
      }
    }
    if (!items[i].error.empty()) {
      ctx.err << "error: " << files[i].filename().string() << ": " << items[i].error << '\n';
      failures.push_back({{"file", files[i].filename().string()}, {"error", items[i].error}});
      continue;
    }
    for (const auto& f : items[i].report["fits"]) {
      if (f.contains("error")) continue;
      const auto name = f["family"].get<std::string>();
      if (!rss.count(name)) family_order.push_back(name);
      rss[name].push_back(f["rss"].get<double>());
      for (Measure m : kAllMeasures) {
        const auto key = std::string(measure_name(m));
        if (f["errors"].contains(key) && f["errors"][key].is_number()) {
          errors[name][m].push_back(f["errors"][key].get<double>());
        }
      }
    }
    reports.push_back(items[i].report);
  }

  Json aggregate = Json::array();
  for (const auto& name : family_order) {
    Json measure_errors = Json::object();
    for (Measure m : kAllMeasures) {
      measure_errors[std::string(measure_name(m))] = distribution_json(errors[name][m], true);
    }
    aggregate.push_back({{"family", name},
                         {"datasets", rss[name].size()},
                         {"rss", distribution_json(rss[name], false)},
                         {"errors", measure_errors}});
  }

  if (ctx.opt.format == "csv") {
    std::string text = "family,statistic,rss";
    for (Measure m : kAllMeasures) text += fmt::format(",{}", measure_name(m));
    text += "\n";
    const std::pair<const char*, const char*> rows[] = {{"Average", "average"}, {"10%", "p10"}, {"25%", "p25"},
                                                        {"50%", "p50"},         {"75%", "p75"}, {"90%", "p90"}};
    auto cell = [](const Json& v) { return v.is_null() ? std::string() : fmt::format("{:.17g}", v.get<double>()); };
    for (const auto& a : aggregate) {
      for (const auto& [label, key] : rows) {
        text += fmt::format("{},{},{}", a["family"].get<std::string>(), label, cell(a["rss"][key]));
        for (Measure m : kAllMeasures) text += "," + cell(a["errors"][std::string(measure_name(m))][key]);
        text += "\n";
      }
    }
    write_output(ctx, text, out);
  } else {
    require_json_format(ctx.opt);
    Json report = base_report(ctx);
    report["batch"] = {{"datasets", files.size()},
                       {"consumed", reports.size()},
                       {"failed", failures.size()},
                       {"reports", reports},
                       {"failures", failures},
                       {"aggregate", aggregate}};
    report["warnings"] = ctx.warnings;
    write_output(ctx, dump(report), out);
  }
  return reports.empty() ? kExitFailure : kExitOk;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("LORENZ_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Failure{kExitFailure, fmt::format("LORENZ_SEED='{}' is not an unsigned integer", s)};
  }
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit parametric Lorenz curves to grouped income data", "lorenzfit"};
  app.set_version_flag("--version", LORENZ_VERSION);
  app.require_subcommand(1);
  Options o;
  std::optional<std::uint64_t> seed_flag;

  const std::vector<std::string> families = {"kakwani", "kakwani1", "ortega", "l2", "l3", "gq"};
  std::vector<std::string> with_all = families;
  with_all.push_back("all");

  auto add_model = [&](CLI::App* cmd, bool allow_all) {
    cmd->add_option("--model", o.model, "Lorenz family")
        ->check(CLI::IsMember(allow_all ? with_all : families));
  };
  auto add_params = [&](CLI::App* cmd) {
    cmd->add_option("--params", o.params, "Comma-separated parameters in the family's order");
  };
  auto add_mode = [&](CLI::App* cmd) {
    cmd->add_option("--mode", o.mode, "constrained or diagnostic")
        ->check(CLI::IsMember({"constrained", "diagnostic"}));
  };
  auto add_money = [&](CLI::App* cmd) {
    cmd->add_option("--mean", o.mean, "Mean income per person-day")->check(CLI::PositiveNumber);
    cmd->add_option("--povline", o.povline, "Poverty line per person-day (default 3.00)")
        ->check(CLI::PositiveNumber);
  };
  auto add_fitting = [&](CLI::App* cmd) {
    cmd->add_option("--multistart", o.multistart, "Start points per family")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed_flag, "Seed (default: LORENZ_SEED, then 20240601)");
  };
  auto add_out = [&](CLI::App* cmd, std::vector<std::string> formats) {
    cmd->add_option("--out", o.out, "Write the report to this file");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember(formats));
  };

  auto* fit = app.add_subcommand("fit", "Fit one family or all of them to a dataset");
  add_model(fit, true);
  fit->add_option("--data", o.data, "Dataset (.csv or .json)")->required();
  add_mode(fit);
  add_money(fit);
  add_fitting(fit);
  add_out(fit, {"json"});

  auto* compare = app.add_subcommand("compare", "Fit all families and tabulate fit and measure errors");
  compare->add_option("--data", o.data, "Dataset (.csv or .json)")->required();
  add_mode(compare);
  add_money(compare);
  add_fitting(compare);
  add_out(compare, {"json", "csv"});

  auto* validate = app.add_subcommand("validate", "Check whether parameters give a genuine Lorenz curve");
  add_model(validate, false);
  add_params(validate);
  add_out(validate, {"json"});

  auto* measures = app.add_subcommand("measures", "Poverty and inequality measures of a model");
  add_model(measures, false);
  add_params(measures);
  add_mode(measures);
  add_money(measures);
  add_out(measures, {"json"});

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo bias and standard errors");
  add_model(simulate_cmd, false);
  add_params(simulate_cmd);
  add_mode(simulate_cmd);
  add_money(simulate_cmd);
  add_fitting(simulate_cmd);
  simulate_cmd->add_option("--n", o.sizes, "Sample sizes (default 500 2500 5000)")->delimiter(',');
  simulate_cmd->add_option("--reps", o.reps, "Replications per sample size")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--groups", o.groups, "Equal-count groups")->check(CLI::Range(2, 1000000));
  simulate_cmd->add_option("--refit", o.refit, "Family fitted in each replication")
      ->check(CLI::IsMember(families));
  simulate_cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_out(simulate_cmd, {"json"});

  auto* curve = app.add_subcommand("curve", "Sample the curve for plotting");
  add_model(curve, false);
  add_params(curve);
  add_mode(curve);
  curve->add_option("--points", o.points, "Equally spaced points including both ends");
  add_out(curve, {"csv", "json"});

  auto* batch = app.add_subcommand("batch", "Fit every dataset in a directory and aggregate");
  batch->add_option("--dir", o.dir, "Directory of .csv/.json datasets");
  batch->add_option("--data", o.data, "Same as --dir");
  add_model(batch, true);
  add_mode(batch);
  add_money(batch);
  add_fitting(batch);
  batch->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  add_out(batch, {"json", "csv"});

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << LORENZ_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  Context ctx{o, err, {}};
  try {
    auto& opt = ctx.opt;
    opt.command = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommands().front();
    opt.has_mean = sub->get_option_no_throw("--mean") && sub->get_option("--mean")->count() > 0;
    opt.has_povline = sub->get_option_no_throw("--povline") && sub->get_option("--povline")->count() > 0;
    if (seed_flag) {
      opt.seed = *seed_flag;
      opt.seed_source = "flag";
    } else if (const auto env = env_seed()) {
      opt.seed = *env;
      opt.seed_source = "environment";
    }
    if (opt.model.empty() && (opt.command == "fit" || opt.command == "batch")) opt.model = "all";

    if (opt.command == "fit") return cmd_fit(ctx, out);
    if (opt.command == "compare") return cmd_compare(ctx, out);
    if (opt.command == "validate") return cmd_validate(ctx, out);
    if (opt.command == "measures") return cmd_measures(ctx, out);
    if (opt.command == "simulate") return cmd_simulate(ctx, out);
    if (opt.command == "curve") return cmd_curve(ctx, out);
    if (opt.command == "batch") return cmd_batch(ctx, out);
    err << "error: unknown command\n";
    return kExitFailure;
  } catch (const Failure& f) {
    err << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace lorenz::cli
