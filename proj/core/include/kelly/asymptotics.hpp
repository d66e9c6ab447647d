#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "kelly/returns_model.hpp"

namespace kelly {

/// Per-path running relative log growth (1/n)(log W_K(n) - log W_K*(n))
/// for n = 1..horizon, with both portfolios rebalanced every step on the
/// same drawn return sequence.
class PathEnsemble {
 public:
  PathEnsemble(std::size_t paths, std::size_t horizon, std::uint64_t seed, Vector values);

  [[nodiscard]] std::size_t paths() const noexcept { return paths_; }
  [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  /// Value of `path` after n steps, 1 <= n <= horizon.
  [[nodiscard]] double value(std::size_t path, std::size_t n) const {
    return values_[path * horizon_ + (n - 1)];
  }
  [[nodiscard]] const Vector& raw() const noexcept { return values_; }

  friend bool operator==(const PathEnsemble&, const PathEnsemble&) = default;

 private:
  std::size_t paths_;
  std::size_t horizon_;
  std::uint64_t seed_;
  Vector values_;  // row-major, paths x horizon
};

PathEnsemble simulate_relative_paths(const JointReturnDistribution& dist,
                                     const PortfolioWeights& weights,
                                     const PortfolioWeights& reference, std::size_t horizon,
                                     std::size_t paths, std::uint64_t seed);

/// The almost-sure bound (2 log n) / n on the relative log growth.
[[nodiscard]] double asymptotic_bound(std::size_t n);

struct BoundViolations {
  std::size_t paths = 0;
  std::vector<std::size_t> counts;  // counts[n - 1]: paths above the bound at step n
  std::optional<std::size_t> last_violation;  // largest n with any violation
  double tail_fraction = 0.0;                 // violation fraction at n = horizon

  [[nodiscard]] double fraction(std::size_t n) const {
    return static_cast<double>(counts[n - 1]) / static_cast<double>(paths);
  }
  /// Total violations over steps n >= from.
  [[nodiscard]] std::size_t violations_from(std::size_t from) const;
};

BoundViolations check_asymptotic_bound(const PathEnsemble& ensemble);

struct EnsembleSummaryRow {
  std::size_t n = 0;
  double mean = 0.0;
  double max = 0.0;
  double violation_fraction = 0.0;

  friend bool operator==(const EnsembleSummaryRow&, const EnsembleSummaryRow&) = default;
};

std::vector<EnsembleSummaryRow> summarize(const PathEnsemble& ensemble);

struct CrossSection {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Mean and standard error across paths at step n.
CrossSection cross_section(const PathEnsemble& ensemble, std::size_t n);

struct AccountTrajectory {
  double initial_value = 1.0;
  Vector values;  // values[k] = V(k), values[0] = V(0)
  PortfolioWeights weights;
};

/// V(k) = (1 + K^T X_k) V(0) along one simulated path, where X_k is the
/// realized k-step compound return (allocation made at 0, never rebalanced).
AccountTrajectory account_trajectory(const JointReturnDistribution& dist,
                                     const PortfolioWeights& weights, double initial_value,
                                     std::size_t horizon, std::uint64_t seed);

/// 1 + min_i ((1 + X_min,i)^n - 1): a positive lower bound on V(n) / V(0)
/// that holds on every realization for any weights in the simplex.
double survival_lower_bound(const JointReturnDistribution& dist, const PortfolioWeights& weights,
                            int n);

}  // namespace kelly
