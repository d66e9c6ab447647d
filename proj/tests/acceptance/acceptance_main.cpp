// One PASS/FAIL/SKIP line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "kelly/asymptotics.hpp"
#include "kelly/backtest.hpp"
#include "kelly/certificates.hpp"
#include "kelly/elg.hpp"
#include "kelly/random.hpp"
#include "kelly/solver.hpp"
#include "support/models.hpp"

namespace {

using namespace kelly;
using kelly::testing::random_model;
using kelly::testing::random_weights;

enum class Status { pass, fail, skip };

struct Verdict {
  Status status;
  std::string detail;
};

Verdict check(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

// Shared by criteria 2 and 3.
std::vector<std::pair<JointReturnDistribution, int>> oracle_models() {
  std::mt19937_64 rng(20260101);
  std::vector<std::pair<JointReturnDistribution, int>> out;
  for (int t = 0; t < 50; ++t) out.emplace_back(random_model(rng), 1 + t % 2);
  return out;
}

Verdict analytic_optimum() {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run({"solve", "--dist", std::string(KELLY_TEST_DATA_DIR) + "/stock_cash.json",
                             "--n", "1"},
                            out, err);
  if (code != 0) return {Status::fail, "solve exited " + std::to_string(code) + ": " + err.str()};
  const auto doc = nlohmann::json::parse(out.str());
  const double k0 = doc["weights"][0].get<double>();
  const double k1 = doc["weights"][1].get<double>();
  const double g = doc["optimal_value"].get<double>();
  const double werr = std::max(std::abs(k0 - 2.0 / 3.0), std::abs(k1 - 1.0 / 3.0));
  const double gerr = std::abs(g - (0.5 * std::log(4.0 / 3.0) + 0.5 * std::log(0.8)));
  return check(werr <= 1e-6 && gerr <= 1e-9 && doc["certificate"]["pass"].get<bool>(),
               fmt::format("|K-K*|={:.2e} |g-g*|={:.2e}", werr, gerr));
}

Verdict oracle_equivalence() {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [dist, n] : oracle_models()) {
    const auto result = solve(dist, n);
    const auto grid = grid_oracle(dist, n, 100);
    worst = std::min(worst, result.optimal_value - grid.value);
  }
  return check(worst >= -1e-6, fmt::format("min(solve - grid) = {:.3e} over 50 models", worst));
}

Verdict certificate_round_trip() {
  int passed = 0;
  double worst_residual = 0.0;
  for (const auto& [dist, n] : oracle_models()) {
    const auto c = compound_exact(dist, n);
    const auto cert = kkt_certify(c, solve(c).weights, 1e-6);
    passed += cert.pass;
    worst_residual = std::max(worst_residual, cert.max_residual);
  }
  std::mt19937_64 rng(3);
  double identity = 0.0;
  for (int t = 0; t < 500; ++t) {
    const auto dist = random_model(rng);
    const auto c = compound_exact(dist, 1 + t % 3);
    const auto k = random_weights(rng, dist.asset_count());
    const auto ratios = expected_ratios(c, k);
    double sum = 0.0;
    for (std::size_t j = 0; j < ratios.size(); ++j) sum += k[j] * ratios[j];
    identity = std::max(identity, std::abs(sum - 1.0));
  }
  return check(passed == 50 && identity <= 1e-12,
               fmt::format("{}/50 certified (max residual {:.2e}), identity error {:.2e}", passed,
                           worst_residual, identity));
}

// Asset j gets a gross return c * max_i(1 + x_i) in every scenario, so every
// ratio E[(1 + X_i)/(1 + X_j)] is at most 1/c.
JointReturnDistribution with_dominant(std::mt19937_64& rng, std::size_t j) {
  const auto base = random_model(rng);
  std::uniform_real_distribution<double> lift(1.0, 1.1);
  const double c = lift(rng);
  std::vector<Vector> scenarios;
  Vector probs;
  for (std::size_t s = 0; s < base.scenario_count(); ++s) {
    const auto x = base.scenario(s);
    Vector row(x.begin(), x.end());
    const double best = 1.0 + *std::max_element(row.begin(), row.end());
    row.insert(row.begin() + static_cast<std::ptrdiff_t>(std::min(j, row.size())), c * best - 1.0);
    scenarios.push_back(std::move(row));
    probs.push_back(base.probability(s));
  }
  return JointReturnDistribution(std::move(scenarios), std::move(probs));
}

Verdict dominance_both_directions() {
  std::mt19937_64 rng(404);
  int forward_fail = 0;
  for (int t = 0; t < 30; ++t) {
    const std::size_t j = static_cast<std::size_t>(t % 3);
    const auto dist = with_dominant(rng, j);
    const std::size_t where = std::min(j, dist.asset_count() - 1);
    for (int n = 1; n <= 3; ++n) {
      if (solve(dist, n).weights[where] < 1.0 - 1e-6) ++forward_fail;
    }
  }
  int corners = 0;
  int reverse_fail = 0;
  for (int t = 0; t < 300; ++t) {
    const auto dist = random_model(rng);
    const auto result = solve(dist, 1);
    const auto& w = result.weights.vector();
    const auto top = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    if (w[top] < 1.0 - 1e-6) continue;
    ++corners;
    for (std::size_t i = 0; i < dist.asset_count(); ++i) {
      if (i != top && dominance_condition(dist, i, top) > 1.0 + 1e-6) ++reverse_fail;
    }
  }
  return check(forward_fail == 0 && reverse_fail == 0 && corners > 0,
               fmt::format("constructed: {} misses of 90 solves; corners: {} found, {} condition breaches",
                           forward_fail, corners, reverse_fail));
}

Verdict relative_wealth() {
  std::mt19937_64 rng(55);
  double worst_ratio = -1.0;
  double worst_log = -1.0;
  int models = 0;
  for (int t = 0; t < 20; ++t) {
    const auto dist = t == 0 ? kelly::testing::stock_cash() : random_model(rng);
    const auto c = compound_exact(dist, 1 + t % 3);
    const auto best = solve(c);
    if (!kkt_certify(c, best.weights).pass) return {Status::fail, "optimum not certified"};
    ++models;
    for (int d = 0; d < 100; ++d) {
      const auto k = random_weights(rng, dist.asset_count());
      worst_ratio = std::max(worst_ratio, expected_relative_wealth(c, k, best.weights));
      worst_log = std::max(worst_log, expected_log_relative_wealth(c, k, best.weights));
    }
  }
  return check(worst_ratio <= 1.0 + 1e-8 && worst_log <= 1e-8,
               fmt::format("{} models x 100 K: max E[ratio] = {:.12f}, max E[log] = {:.2e}", models,
                           worst_ratio, worst_log));
}

Verdict asymptotic_bound_check() {
  const auto dist = kelly::testing::stock_cash();
  const auto c = compound_exact(dist, 1);
  const auto k_star = solve(c).weights;
  const auto k = PortfolioWeights::vertex(2, 1);
  constexpr std::size_t horizon = 10'000;
  const auto ensemble = simulate_relative_paths(dist, k, k_star, horizon, 1000, 6);
  const auto violations = check_asymptotic_bound(ensemble);
  const std::size_t late = violations.violations_from(100);
  const auto cs = cross_section(ensemble, horizon);
  const double expected = elg_exact(c, k).value - elg_exact(c, k_star).value;
  const double z = std::abs(cs.mean - expected) / cs.std_error;
  return check(late == 0 && z <= 3.0,
               fmt::format("violations for n>=100: {}; mean {:.5f} vs {:.5f} ({:.2f} SE)", late,
                           cs.mean, expected, z));
}

Verdict survival() {
  std::mt19937_64 rng(7);
  int breaches = 0;
  double min_value = std::numeric_limits<double>::infinity();
  for (int draw = 0; draw < 1000; ++draw) {
    const auto dist = random_model(rng, {.max_assets = 3, .min_assets = 1, .max_scenarios = 4,
                                         .low = -0.95, .high = 1.0});
    const auto k = random_weights(rng, dist.asset_count());
    const auto path = account_trajectory(dist, k, 1.0, 30, rng());
    for (std::size_t n = 1; n < path.values.size(); ++n) {
      min_value = std::min(min_value, path.values[n]);
      const double bound = survival_lower_bound(dist, k, static_cast<int>(n));
      if (!(path.values[n] > 0.0) || path.values[n] < bound - 1e-12 * std::max(1.0, bound)) ++breaches;
    }
  }
  return check(breaches == 0 && min_value > 0.0,
               fmt::format("1000 draws x 30 steps: {} breaches, min V = {:.3e}", breaches, min_value));
}

Verdict backtest_correctness() {
  PriceSeries s;
  s.assets = {"A1", "A2", "A3"};
  Vector price{100.0, 100.0, 100.0};
  for (int k = 0; k < 120; ++k) {
    s.dates.push_back(fmt::format("d{:04}", k));
    s.prices.push_back(price);
    price[0] *= 1.01;
  }
  BacktestConfig config;
  config.window = 20;
  const auto r = run_backtest(s, config);
  const auto x = realized_returns(s);
  bool locked = true;
  double growth_err = 0.0;
  for (std::size_t k = config.window; k + 1 < s.rows(); ++k) {
    locked = locked && r.signals[k] && *r.signals[k] == PortfolioWeights::vertex(3, 0) &&
             r.values[k + 1] == r.values[k] * (1.0 + x[k][0]);
    growth_err = std::max(growth_err, std::abs(r.values[k + 1] / r.values[k] - 1.01));
  }
  bool warm = true;
  for (std::size_t k = 0; k <= config.window; ++k) warm = warm && r.values[k] == 1.0;

  // Estimator consistency against the exact one-step ratio.
  const JointReturnDistribution dist({{0.03, 0.0, -0.01}, {-0.02, 0.0, 0.04}, {0.01, 0.0, 0.0}},
                                     {0.4, 0.35, 0.25});
  constexpr std::size_t window = 20;
  constexpr std::size_t windows = 2000;
  const CounterRng rng(8, 0);
  ReturnMatrix returns(window * windows);
  for (std::size_t k = 0; k < returns.size(); ++k) {
    const auto row = dist.scenario(dist.scenario_for(rng.uniform(k)));
    returns[k].assign(row.begin(), row.end());
  }
  double worst_z = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i == j) continue;
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t w = 0; w < windows; ++w) {
        const double v = sliding_expected_ratio(returns, i, j, (w + 1) * window - 1, window);
        sum += v;
        sq += v * v;
      }
      const double nw = static_cast<double>(windows);
      const double mean = sum / nw;
      const double se = std::sqrt((sq / nw - mean * mean) / (nw - 1));
      worst_z = std::max(worst_z, std::abs(mean - dominance_condition(dist, i, j)) / se);
    }
  }
  return check(locked && warm && growth_err <= 1e-12 && worst_z <= 3.0,
               fmt::format("locked={} warmup flat={} |step-1.01|<={:.1e}; estimator max {:.2f} SE",
                           locked, warm, growth_err, worst_z));
}

Verdict historical_backtest() {
  const char* path = std::getenv("KELLY_VTBND_CSV");
  if (path == nullptr || *path == '\0') {
    return {Status::skip, "set KELLY_VTBND_CSV to a date,VT,BND,BNDX close-price CSV"};
  }
  PriceSeries all = load_prices(path);
  PriceSeries s;
  s.assets = all.assets;
  for (std::size_t k = 0; k < all.rows(); ++k) {
    if (all.dates[k] >= "2019-02-14" && all.dates[k] <= "2020-02-14") {
      s.dates.push_back(all.dates[k]);
      s.prices.push_back(all.prices[k]);
    }
  }
  BacktestConfig config;
  config.window = 20;
  const auto r = run_backtest(s, config);
  const double ret = r.summary.total_return;
  return check(ret >= 0.18 && ret <= 0.28,
               fmt::format("{} rows, total return {:.4f}", s.rows(), ret));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"analytic optimum", analytic_optimum},
      {"oracle equivalence", oracle_equivalence},
      {"certificate round-trip", certificate_round_trip},
      {"dominant asset both directions", dominance_both_directions},
      {"expected relative wealth", relative_wealth},
      {"asymptotic bound", asymptotic_bound_check},
      {"survival", survival},
      {"backtest correctness", backtest_correctness},
      {"historical backtest (data-gated)", historical_backtest},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = v.status == Status::pass ? "PASS" : v.status == Status::fail ? "FAIL" : "SKIP";
    failures += v.status == Status::fail;
    std::printf("[%s] criterion %zu: %s -- %s (%.2fs)\n", tag, i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
