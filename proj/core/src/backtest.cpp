#include "kelly/backtest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "csv.hpp"
#include "kelly/error.hpp"

namespace kelly {

void PriceSeries::validate() const {
  if (assets.empty()) throw InputError("prices: no asset columns");
  if (dates.size() != prices.size()) throw InputError("prices: date and row counts differ");
  for (std::size_t k = 0; k < prices.size(); ++k) {
    const std::string row = "prices: row " + std::to_string(k + 1);
    if (prices[k].size() != assets.size()) {
      throw InputError(row + " has " + std::to_string(prices[k].size()) + " prices, expected " +
                       std::to_string(assets.size()));
    }
    for (std::size_t i = 0; i < assets.size(); ++i) {
      if (!std::isfinite(prices[k][i]) || prices[k][i] <= 0.0) {
        throw InputError(row + ", column " + assets[i] + ": price must be positive");
      }
    }
    if (k > 0 && !(dates[k - 1] < dates[k])) {
      throw InputError(row + ": date '" + dates[k] + "' does not follow '" + dates[k - 1] + "'");
    }
  }
}

PriceSeries parse_prices(std::istream& in) {
  PriceSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (header) {
      if (cells.size() < 2) throw InputError("prices: header needs a date column and assets");
      for (std::size_t c = 1; c < cells.size(); ++c) {
        if (cells[c].empty()) throw InputError("prices: empty asset name in header");
        series.assets.emplace_back(cells[c]);
      }
      header = false;
      continue;
    }
    const std::string where = "prices: line " + std::to_string(line_no);
    if (cells.size() != series.assets.size() + 1) {
      throw InputError(where + " has " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(series.assets.size() + 1));
    }
    if (cells[0].empty()) throw InputError(where + ": missing date");
    series.dates.emplace_back(cells[0]);
    Vector row;
    row.reserve(series.assets.size());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      row.push_back(detail::parse_number(cells[c], where + ", column " + series.assets[c - 1]));
    }
    series.prices.push_back(std::move(row));
  }
  if (header) throw InputError("prices: empty input");
  series.validate();
  return series;
}

PriceSeries load_prices(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open prices file " + path.string());
  return parse_prices(in);
}

ReturnMatrix realized_returns(const PriceSeries& series) {
  ReturnMatrix out;
  if (series.rows() < 2) return out;
  out.assign(series.rows() - 1, Vector(series.asset_count()));
  for (std::size_t k = 0; k + 1 < series.rows(); ++k) {
    for (std::size_t i = 0; i < series.asset_count(); ++i) {
      const double now = series.prices[k][i];
      out[k][i] = (series.prices[k + 1][i] - now) / now;
    }
  }
  return out;
}

std::string_view to_string(FallbackPolicy policy) noexcept {
  switch (policy) {
    case FallbackPolicy::hold_previous:
      return "hold-previous";
    case FallbackPolicy::all_riskless:
      return "all-riskless";
    case FallbackPolicy::flat:
      return "flat";
  }
  return "unknown";
}

FallbackPolicy parse_fallback(std::string_view text) {
  if (text == "hold" || text == "hold-previous") return FallbackPolicy::hold_previous;
  if (text == "riskless" || text == "all-riskless") return FallbackPolicy::all_riskless;
  if (text == "flat") return FallbackPolicy::flat;
  throw InputError("unknown fallback policy '" + std::string(text) + "'");
}

void BacktestConfig::validate(std::size_t asset_count) const {
  if (window < 1) throw InputError("backtest: window must be >= 1");
  if (!(initial_value > 0.0) || !std::isfinite(initial_value)) {
    throw InputError("backtest: initial value must be positive");
  }
  if (riskless_index && *riskless_index >= asset_count) {
    throw InputError("backtest: riskless index out of range");
  }
  if (fallback == FallbackPolicy::all_riskless && !riskless_index) {
    throw InputError("backtest: the riskless fallback needs a riskless index");
  }
}

double sliding_expected_ratio(const ReturnMatrix& returns, std::size_t i, std::size_t j,
                              std::size_t k, std::size_t window) {
  if (window < 1) throw InputError("sliding ratio: window must be >= 1");
  if (k >= returns.size()) throw InputError("sliding ratio: step beyond the return history");
  if (k + 1 < window) {
    throw DomainError("sliding ratio: step " + std::to_string(k) + " has fewer than " +
                      std::to_string(window) + " returns of history");
  }
  const std::size_t m = returns[k].size();
  if (i >= m || j >= m) throw InputError("sliding ratio: asset index out of range");
  if (i == j) return 1.0;
  double acc = 0.0;
  for (std::size_t l = 0; l < window; ++l) {
    const Vector& x = returns[k - l];
    acc += (1.0 + x[i]) / (1.0 + x[j]);
  }
  return acc / static_cast<double>(window);
}

std::vector<Vector> sliding_ratio_matrix(const ReturnMatrix& returns, std::size_t k,
                                         std::size_t window) {
  if (k >= returns.size()) throw InputError("sliding ratio: step beyond the return history");
  const std::size_t m = returns[k].size();
  std::vector<Vector> ratios(m, Vector(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) ratios[i][j] = sliding_expected_ratio(returns, i, j, k, window);
  }
  return ratios;
}

std::optional<std::size_t> window_dominant(const std::vector<Vector>& ratios) {
  const std::size_t m = ratios.size();
  for (std::size_t j = 0; j < m; ++j) {
    bool dominant = true;
    for (std::size_t i = 0; i < m && dominant; ++i) {
      if (i != j && ratios[i][j] > 1.0) dominant = false;
    }
    if (dominant) return j;
  }
  return std::nullopt;
}

namespace {

std::optional<PortfolioWeights> signal_from_ratios(const std::vector<Vector>& ratios,
                                                   const BacktestConfig& config,
                                                   const std::optional<PortfolioWeights>& previous) {
  const std::size_t m = ratios.size();
  if (const auto j = window_dominant(ratios)) return PortfolioWeights::vertex(m, *j);
  switch (config.fallback) {
    case FallbackPolicy::hold_previous:
      return previous;
    case FallbackPolicy::all_riskless:
      return PortfolioWeights::vertex(m, config.riskless_index.value());
    case FallbackPolicy::flat:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

std::optional<PortfolioWeights> dominant_ratio_signal(const ReturnMatrix& returns, std::size_t k,
                                                      const BacktestConfig& config,
                                                      const std::optional<PortfolioWeights>& previous) {
  if (k >= returns.size()) throw InputError("signal: step beyond the return history");
  config.validate(returns[k].size());
  return signal_from_ratios(sliding_ratio_matrix(returns, k, config.window), config, previous);
}

AccountTrajectory buy_and_hold(const PriceSeries& series, const PortfolioWeights& weights,
                               double initial_value) {
  if (weights.size() != series.asset_count()) {
    throw InputError("buy_and_hold: weights do not match the asset count");
  }
  if (!(initial_value > 0.0)) throw InputError("buy_and_hold: initial value must be positive");
  AccountTrajectory out{initial_value, {}, weights};
  out.values.reserve(series.rows());
  for (std::size_t k = 0; k < series.rows(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < series.asset_count(); ++i) {
      acc += weights[i] * (series.prices[k][i] / series.prices[0][i]);
    }
    out.values.push_back(initial_value * acc);
  }
  return out;
}

BacktestResult run_backtest(const PriceSeries& series, const BacktestConfig& config) {
  series.validate();
  const std::size_t m = series.asset_count();
  config.validate(m);
  const std::size_t window = config.window;
  if (series.rows() < window + 2) {
    throw DomainError("backtest: " + std::to_string(series.rows()) +
                      " price rows are too few for window " + std::to_string(window) +
                      " (need " + std::to_string(window + 2) + ")");
  }

  const ReturnMatrix returns = realized_returns(series);
  const std::size_t steps = returns.size();

  BacktestResult result;
  result.assets = series.assets;
  result.dates = series.dates;
  result.values.assign(series.rows(), config.initial_value);
  result.signals.assign(series.rows(), std::nullopt);
  result.dominance.assign(series.rows(), {});

  std::optional<PortfolioWeights> held;
  for (std::size_t k = window; k < steps; ++k) {
    // Window over x(k - M) .. x(k - 1): only returns known when trading at k.
    auto ratios = sliding_ratio_matrix(returns, k - 1, window);
    held = signal_from_ratios(ratios, config, held);
    result.dominance[k] = std::move(ratios);
    result.signals[k] = held;
    const double growth = held ? held->gross(returns[k]) : 1.0;
    result.values[k + 1] = growth * result.values[k];
  }

  for (std::size_t i = 0; i < m; ++i) {
    result.baselines.push_back(
        {"BH_" + series.assets[i],
         buy_and_hold(series, PortfolioWeights::vertex(m, i), config.initial_value).values});
  }
  result.baselines.push_back(
      {"BH_equal", buy_and_hold(series, PortfolioWeights::uniform(m), config.initial_value).values});

  BacktestSummary& summary = result.summary;
  summary.initial_value = config.initial_value;
  summary.final_value = result.values.back();
  summary.total_return = summary.final_value / summary.initial_value - 1.0;
  summary.mean_log_growth =
      std::log(summary.final_value / summary.initial_value) / static_cast<double>(steps);
  summary.window = window;
  summary.warmup = window;
  summary.trading_steps = steps - window;
  summary.fallback = config.fallback;
  return result;
}

}  // namespace kelly
