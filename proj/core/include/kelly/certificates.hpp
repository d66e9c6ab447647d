#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "kelly/returns_model.hpp"

namespace kelly {

inline constexpr double kDefaultCertificateTolerance = 1e-6;
inline constexpr double kDefaultSupportEpsilon = 1e-9;

/// Which optimality condition applies to an asset: assets held with weight
/// above the support threshold need E[ratio] == 1, the rest E[ratio] <= 1.
enum class Condition { equality, inequality };

struct AssetVerdict {
  double ratio = 0.0;  // E[(1 + X_n,i) / (1 + K^T X_n)]
  Condition condition = Condition::equality;
  double residual = 0.0;
  bool satisfied = false;

  friend bool operator==(const AssetVerdict&, const AssetVerdict&) = default;
};

struct OptimalityCertificate {
  std::vector<AssetVerdict> assets;
  double max_residual = 0.0;
  bool pass = false;
  double tolerance = kDefaultCertificateTolerance;
  double support_epsilon = kDefaultSupportEpsilon;

  friend bool operator==(const OptimalityCertificate&, const OptimalityCertificate&) = default;
};

/// Pairwise one-step ratios ratios[i][j] = E[(1 + X_i) / (1 + X_j)] and the
/// dominant asset, if any.
struct DominanceReport {
  std::vector<Vector> ratios;
  std::optional<std::size_t> dominant;
  double tolerance = kDefaultCertificateTolerance;

  friend bool operator==(const DominanceReport&, const DominanceReport&) = default;
};

/// E[(1 + X_n,i) / (1 + K^T X_n)] over an exact compound distribution.
double expected_ratio_asset(const CompoundReturnDistribution& compound,
                            const PortfolioWeights& weights, std::size_t asset);

/// All per-asset expected ratios in a single pass.
Vector expected_ratios(const CompoundReturnDistribution& compound, const PortfolioWeights& weights);

/// Largest violation of the optimality conditions at `weights`:
/// |ratio - 1| on supported assets, max(ratio - 1, 0) on the rest.
double kkt_residual(const CompoundReturnDistribution& compound, const PortfolioWeights& weights,
                    double support_epsilon = kDefaultSupportEpsilon);

OptimalityCertificate kkt_certify(const CompoundReturnDistribution& compound,
                                  const PortfolioWeights& weights,
                                  double tolerance = kDefaultCertificateTolerance,
                                  double support_epsilon = kDefaultSupportEpsilon);

/// E[(1 + X_i) / (1 + X_j)] for one step. Exactly 1 when i == j.
double dominance_condition(const JointReturnDistribution& dist, std::size_t i, std::size_t j);

/// Smallest j with dominance_condition(i, j) <= 1 + tolerance for all i != j.
DominanceReport find_dominant(const JointReturnDistribution& dist,
                              double tolerance = kDefaultCertificateTolerance);

/// E[(1 + K^T X_n) / (1 + K*^T X_n)].
double expected_relative_wealth(const CompoundReturnDistribution& compound,
                                const PortfolioWeights& weights,
                                const PortfolioWeights& reference);

/// E[log((1 + K^T X_n) / (1 + K*^T X_n))].
double expected_log_relative_wealth(const CompoundReturnDistribution& compound,
                                    const PortfolioWeights& weights,
                                    const PortfolioWeights& reference);

}  // namespace kelly
