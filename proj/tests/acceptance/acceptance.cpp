// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lorenz/estimation.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/montecarlo.hpp"
#include "lorenz_cli/app.hpp"
#include "lorenz_cli/dataset_io.hpp"
#include "param_draws.hpp"

using namespace lorenz;
using lorenz::testing::mixed_model;
using lorenz::testing::uniform;
using lorenz::testing::valid_model;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += fmt::format("; over the {:.0f} s budget", budget_s);
  }
  failures += o.pass ? 0 : 1;
  fmt::print("{} [{:2d}] {}: {} ({:.2f} s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail, secs);
  std::fflush(stdout);
}

GroupedDataset deciles(const LorenzModel& model) {
  GroupedDataset d;
  for (int j = 1; j < 10; ++j) {
    d.u.push_back(j / 10.0);
    d.s.push_back(evaluate(model, j / 10.0));
  }
  return d;
}

int run_cli(const std::vector<std::string>& args, std::string& out) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  out = o.str();
  return code;
}

}  // namespace

int main() {
  criterion(1, "Beta-curve counterexample via validate", 1.0, [] {
    std::string out;
    const int code = run_cli({"validate", "--model", "kakwani", "--params", "1,0.5,0.5"}, out);
    const auto j = nlohmann::json::parse(out);
    const auto& numeric = j["numeric"];
    const double lo = numeric["negative_span"][0].get<double>();
    const double hi = numeric["negative_span"][1].get<double>();
    const double min_value = numeric["min_value"].get<double>();
    const double at_quarter = evaluate(KakwaniBeta{1, 0.5, 0.5}, 0.25);
    const double oracle = 0.25 - std::sqrt(0.25 * 0.75);  // L(1/4) in closed form
    const bool pass = code == 2 && !j["genuine"].get<bool>() && lo < 1e-6 && hi > 0.499 && hi <= 0.5 &&
                      std::abs(at_quarter - oracle) < 1e-12 && std::abs(at_quarter + 0.183) < 1e-3 &&
                      min_value <= at_quarter;
    return Outcome{pass, fmt::format("exit {}, L < 0 on [{:.0e}, {:.4f}], L(0.25) = {:.6f}, grid min {:.6f}",
                                     code, lo, hi, at_quarter, min_value)};
  });

  criterion(2, "analytic/numeric validity agreement, 1000 draws per family", 60.0, [] {
    std::mt19937_64 rng(2002);
    int disagreements = 0, non_genuine = 0;
    std::string first;
    for (Family f : kAllFamilies) {
      for (int i = 0; i < 1000; ++i) {
        const LorenzModel m = mixed_model(f, rng);
        const bool a = check_validity_analytic(m).genuine;
        const bool n = check_validity_numeric(m, 10001).genuine;
        non_genuine += a ? 0 : 1;
        if (a != n) {
          if (disagreements++ == 0) first = fmt::format(" (first: {} {})", family_name(f), i);
        }
      }
    }
    return Outcome{disagreements == 0, fmt::format("{} disagreements in 6000 draws, {} non-genuine{}",
                                                   disagreements, non_genuine, first)};
  });

  criterion(3, "closed-form Gini vs 1 - 2 int L, 500 draws per family", 60.0, [] {
    std::mt19937_64 rng(3003);
    double worst = 0.0;
    int s_one = 0;
    for (Family f : {Family::KakwaniSpecial, Family::Ortega, Family::SarabiaL2, Family::L3}) {
      for (int i = 0; i < 500; ++i) {
        LorenzModel m = valid_model(f, rng);
        if (auto* l3 = std::get_if<L3>(&m); l3 && i % 5 == 0) {
          l3->s = 1.0;
          ++s_one;
        }
        worst = std::max(worst, std::abs(gini_closed(m) - gini_numeric(m)));
      }
    }
    return Outcome{worst <= 1e-8, fmt::format("max |difference| {:.2e} over 2000 draws ({} L3 draws at s = 1)",
                                              worst, s_one)};
  });

  criterion(4, "worked measure bundle for L = p^2, mean 1, z 1", 1.0, [] {
    const auto set = measure_set(KakwaniSpecial{1, 1}, {1.0, 1.0});
    const double expected[] = {0.5, 0.25, 1.0 / 6.0, 0.5, 1.0 / 3.0, 1.0 - std::log(2.0)};
    double worst = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      const auto& v = set.values[i].value;
      worst = std::max(worst, v ? std::abs(*v - expected[i]) : INFINITY);
    }
    return Outcome{worst <= 1e-8, fmt::format("max |error| {:.2e} over H, FGT1, FGT2, Watts, Gini, MLD", worst)};
  });

  criterion(5, "generalized Gini consistency", 60.0, [] {
    std::mt19937_64 rng(5005);
    double worst_g1 = 0.0, worst_closed = 0.0;
    for (Family f : kAllFamilies) {
      for (int i = 0; i < 50; ++i) {
        const LorenzModel m = valid_model(f, rng);
        worst_g1 = std::max(worst_g1, std::abs(generalized_gini(m, 1.0) - gini(m)));
      }
    }
    for (int i = 0; i < 100; ++i) {
      const LorenzModel m = valid_model(Family::KakwaniSpecial, rng);
      for (double nu : {1.0, 2.0, 3.0, 5.0}) {
        worst_closed = std::max(worst_closed, std::abs(generalized_gini(m, nu) - generalized_gini_numeric(m, nu)));
      }
    }
    return Outcome{worst_g1 <= 1e-9 && worst_closed <= 1e-8,
                   fmt::format("max |G(1) - Gini| {:.2e} (300 draws), max |closed - quadrature| {:.2e} "
                               "(special case, nu in 1,2,3,5)",
                               worst_g1, worst_closed)};
  });

  criterion(6, "in-family EWMD recovery, 100 trials per family", 300.0, [] {
    std::mt19937_64 rng(6006);
    bool pass = true;
    std::string detail;
    for (Family f : kAllFamilies) {
      int ok = 0;
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) {
        const auto r = ewmd_fit(deciles(valid_model(f, rng)), f);
        ok += r.rss < 1e-10 ? 1 : 0;
        worst = std::max(worst, r.rss);
      }
      pass = pass && ok >= 99;
      detail += fmt::format("{}{} {}/100 (max rss {:.1e})", detail.empty() ? "" : ", ", family_name(f), ok, worst);
    }
    return Outcome{pass, detail};
  });

  criterion(7, "simulation trends: bias and SE against N", 900.0, [] {
    std::mt19937_64 rng(7007);
    const Family families[] = {Family::KakwaniSpecial, Family::Ortega, Family::SarabiaL2, Family::L3};
    int bias_cells = 0, bias_ok = 0, se_cells = 0, se_ok = 0;
    for (int i = 0; i < 20; ++i) {
      const LorenzModel truth = valid_model(families[i % 4], rng);
      // Poverty line at the 30th percentile keeps the poverty measures interior.
      const EconomicContext ctx{1.0, derivative(truth, 0.3)};
      std::array<SimSummary, 3> runs;
      const int sizes[] = {500, 2500, 5000};
      for (int k = 0; k < 3; ++k) {
        SimConfig c;
        c.sample_size = sizes[k];
        c.replications = 200;
        c.seed = 7000 + static_cast<std::uint64_t>(i);
        c.fit.multistart = 4;
        runs[static_cast<std::size_t>(k)] = simulate(truth, ctx, c);
      }
      for (Measure m : kAllMeasures) {
        const auto& small = runs[0][m];
        const auto& mid = runs[1][m];
        const auto& large = runs[2][m];
        if (small.abs_bias && large.abs_bias) {
          ++bias_cells;
          bias_ok += *large.abs_bias <= *small.abs_bias ? 1 : 0;
        }
        if (small.se && mid.se && large.se) {
          ++se_cells;
          se_ok += *small.se > *mid.se && *mid.se > *large.se ? 1 : 0;
        }
      }
    }
    const double bias_share = static_cast<double>(bias_ok) / bias_cells;
    const double se_share = static_cast<double>(se_ok) / se_cells;
    return Outcome{bias_share >= 0.90 && se_share >= 0.95,
                   fmt::format("|bias(5000)| <= |bias(500)| in {}/{} cells ({:.1f}%, need 90%), SE monotone in "
                               "{}/{} cells ({:.1f}%, need 95%)",
                               bias_ok, bias_cells, 100 * bias_share, se_ok, se_cells, 100 * se_share)};
  });

  criterion(8, "sampling pipeline consistency at N = 100000", 10.0, [] {
    const KakwaniSpecial model{1, 1};
    RandomSource rng(8008);
    const auto incomes = sample_incomes(model, 1.0, 100000, rng);
    const auto g = group_shares(incomes, 10);
    double worst = 0.0;
    for (std::size_t j = 0; j < g.u.size(); ++j) worst = std::max(worst, std::abs(g.s[j] - evaluate(model, g.u[j])));
    const double mean_error = std::abs(*g.mean - 1.0);
    return Outcome{worst <= 0.005 && mean_error <= 0.01,
                   fmt::format("max decile share error {:.2e}, sample mean {:.5f}", worst, *g.mean)};
  });

  criterion(9, "determinism of simulate and batch", 120.0, [] {
    SimConfig c;
    c.sample_size = 800;
    c.replications = 40;
    c.seed = 9009;
    c.fit.multistart = 4;
    const LorenzModel truth = L3{0.5, 0.8, 1.5, 0.7};
    const EconomicContext ctx{2.0, 1.2};
    const auto a = simulate(truth, ctx, c);
    c.threads = 2;
    const auto b = simulate(truth, ctx, c);
    bool same = a.completed == b.completed;
    for (std::size_t r = 0; r < a.replications.size(); ++r) {
      same = same && a.replications[r].params == b.replications[r].params &&
             a.replications[r].rss == b.replications[r].rss;
      for (Measure m : kAllMeasures) same = same && a.replications[r].measures[m].value == b.replications[r].measures[m].value;
    }
    for (Measure m : kAllMeasures) same = same && a[m].mean_estimate == b[m].mean_estimate && a[m].se == b[m].se;

    const auto dir = fs::temp_directory_path() / fmt::format("lorenz_acceptance_{}", ::getpid());
    fs::create_directories(dir);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 4; ++i) {
      std::ofstream(dir / fmt::format("d{}.csv", i)) << cli::to_csv(deciles(valid_model(Family::L3, rng)));
    }
    std::string first, second;
    run_cli({"batch", "--dir", dir.string(), "--seed", "11", "--mean", "1.5", "--povline", "1"}, first);
    run_cli({"batch", "--dir", dir.string(), "--seed", "11", "--mean", "1.5", "--povline", "1", "--threads", "3"},
            second);
    fs::remove_all(dir);
    const std::regex stamp("\"generated_at\": \"[^\"]*\"");
    const bool batch_same = std::regex_replace(first, stamp, "") == std::regex_replace(second, stamp, "");
    return Outcome{same && batch_same, fmt::format("simulate (1 vs 2 threads) identical: {}, batch (1 vs 3 "
                                                   "threads) identical apart from timestamp: {}",
                                                   same, batch_same)};
  });

  criterion(10, "general quadratic: regression vs iterative fit, endpoint identities", 30.0, [] {
    const auto square = deciles(KakwaniSpecial{1, 1});
    const auto direct = gq_regression(square);
    const auto iterative = gq_iterative(square);
    const double gap = std::abs(gq_implicit_rss(direct, square) - gq_implicit_rss(iterative, square));

    // Endpoint identities on every fitted coefficient set meeting e < 0 and a + c >= 1.
    std::mt19937_64 rng(1010);
    std::vector<GeneralQuadratic> fitted = {direct, iterative};
    for (Family f : {Family::Ortega, Family::L3, Family::GeneralQuadratic, Family::KakwaniSpecial}) {
      for (int i = 0; i < 25; ++i) fitted.push_back(gq_regression(deciles(valid_model(f, rng))));
    }
    int eligible = 0;
    double worst_endpoint = 0.0;
    for (const auto& q : fitted) {
      const double e = -(q.a + q.b + q.c + 1.0);
      if (!(e < 0.0 && q.a + q.c >= 1.0)) continue;
      ++eligible;
      worst_endpoint = std::max({worst_endpoint, std::abs(evaluate(q, 0.0)), std::abs(evaluate(q, 1.0) - 1.0)});
    }
    return Outcome{gap <= 1e-10 && worst_endpoint <= 1e-10 && eligible > 0,
                   fmt::format("implicit rss {:.6e} vs {:.6e} (gap {:.1e}); endpoint error {:.1e} on {}/{} "
                               "eligible fitted sets",
                               gq_implicit_rss(direct, square), gq_implicit_rss(iterative, square), gap,
                               worst_endpoint, eligible, fitted.size())};
  });

  fmt::print("{} of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
