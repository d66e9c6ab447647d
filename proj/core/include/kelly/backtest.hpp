#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kelly/asymptotics.hpp"
#include "kelly/returns_model.hpp"

namespace kelly {

/// Historical prices: one row per date, one column per asset.
struct PriceSeries {
  std::vector<std::string> assets;
  std::vector<std::string> dates;
  std::vector<Vector> prices;

  [[nodiscard]] std::size_t rows() const noexcept { return prices.size(); }
  [[nodiscard]] std::size_t asset_count() const noexcept { return assets.size(); }

  /// Throws InputError on ragged rows, non-positive prices, or dates that
  /// are not strictly increasing (compared as strings).
  void validate() const;
};

/// Reads `date,<asset>,...` CSV. Dates are opaque labels that must sort
/// strictly increasing as strings (ISO-8601 dates do).
PriceSeries parse_prices(std::istream& in);
PriceSeries load_prices(const std::filesystem::path& path);

/// realized[k][i] = (s_i(k+1) - s_i(k)) / s_i(k).
using ReturnMatrix = std::vector<Vector>;
ReturnMatrix realized_returns(const PriceSeries& series);

enum class FallbackPolicy {
  hold_previous,  // keep the prior weights; stay uninvested before the first trade
  all_riskless,   // move everything to the configured riskless asset
  flat,           // stay uninvested for the step (account value unchanged)
};

[[nodiscard]] std::string_view to_string(FallbackPolicy policy) noexcept;
/// Accepts "hold", "riskless", "flat" and the long forms used in summaries.
FallbackPolicy parse_fallback(std::string_view text);

struct BacktestConfig {
  std::size_t window = 20;
  double initial_value = 1.0;
  FallbackPolicy fallback = FallbackPolicy::hold_previous;
  std::optional<std::size_t> riskless_index;

  void validate(std::size_t asset_count) const;
};

/// R_ij(k) = (1/M) sum_{l=0}^{M-1} (1 + x_i(k-l)) / (1 + x_j(k-l)).
/// Exactly 1 when i == j. Throws DomainError when k < M - 1.
double sliding_expected_ratio(const ReturnMatrix& returns, std::size_t i, std::size_t j,
                              std::size_t k, std::size_t window);

/// Full m x m matrix of sliding ratios for the window ending at k.
std::vector<Vector> sliding_ratio_matrix(const ReturnMatrix& returns, std::size_t k,
                                         std::size_t window);

/// Smallest j with R_ij <= 1 for every i != j, if any.
std::optional<std::size_t> window_dominant(const std::vector<Vector>& ratios);

/// Signal from the window ending at return index k: e_j for a dominant j,
/// otherwise the fallback policy. An empty result means "hold nothing".
std::optional<PortfolioWeights> dominant_ratio_signal(
    const ReturnMatrix& returns, std::size_t k, const BacktestConfig& config,
    const std::optional<PortfolioWeights>& previous = std::nullopt);

struct Baseline {
  std::string name;
  Vector values;

  friend bool operator==(const Baseline&, const Baseline&) = default;
};

struct BacktestSummary {
  double initial_value = 1.0;
  double final_value = 1.0;
  double total_return = 0.0;
  double mean_log_growth = 0.0;  // log(V_end / V_0) / (rows - 1)
  std::size_t window = 0;
  std::size_t warmup = 0;
  std::size_t trading_steps = 0;
  FallbackPolicy fallback = FallbackPolicy::hold_previous;

  friend bool operator==(const BacktestSummary&, const BacktestSummary&) = default;
};

struct BacktestResult {
  std::vector<std::string> assets;
  std::vector<std::string> dates;
  Vector values;  // V(k) for every date
  /// Weights held over (k, k+1); empty while uninvested and on the last date.
  std::vector<std::optional<PortfolioWeights>> signals;
  /// Sliding ratio matrix used for the trade at k; empty during warmup.
  std::vector<std::vector<Vector>> dominance;
  std::vector<Baseline> baselines;
  BacktestSummary summary;
};

/// Dominant-ratio trading over `series`. The trade at step k uses the window
/// of returns ending at x(k-1) and earns x(k); the first M steps are warmup.
/// Throws DomainError if the series has fewer than M + 2 rows.
BacktestResult run_backtest(const PriceSeries& series, const BacktestConfig& config);

/// Allocate V0 * K_i to each asset at the first date and never rebalance.
AccountTrajectory buy_and_hold(const PriceSeries& series, const PortfolioWeights& weights,
                               double initial_value);

}  // namespace kelly
