#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "kelly/certificates.hpp"
#include "kelly/returns_model.hpp"

namespace kelly {

/// Snapshot handed to SolveOptions::observer after every accepted step.
struct IterationInfo {
  int iteration = 0;
  const PortfolioWeights* weights = nullptr;
  double objective = 0.0;
  double step = 0.0;
  double residual = 0.0;
};

struct SolveOptions {
  double kkt_tolerance = 1e-8;
  int max_iterations = 10'000;
  double support_epsilon = kDefaultSupportEpsilon;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  // Armijo backtracking: the first trial step is `initial_step`, later
  // iterations start from twice the last accepted step.
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_increase = 1e-4;
  std::function<void(const IterationInfo&)> observer;
};

struct OptimizationResult {
  PortfolioWeights weights;
  double optimal_value = 0.0;  // per-step g_n at `weights`
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
};

/// Maximizes g_n over the unit simplex by projected gradient ascent started
/// from the uniform portfolio, finishing with Newton steps on the support face
/// once the line search can no longer resolve objective changes. Iterates
/// ascend up to rounding of the objective. Stops once the optimality residual
/// drops to opts.kkt_tolerance or after opts.max_iterations steps.
OptimizationResult solve(const JointReturnDistribution& dist, int n, const SolveOptions& opts = {});
OptimizationResult solve(const CompoundReturnDistribution& compound, const SolveOptions& opts = {});

/// Euclidean projection onto the unit simplex (sort and threshold).
/// Throws InputError on empty or non-finite input.
PortfolioWeights project_to_simplex(std::span<const double> v);

struct GridPoint {
  PortfolioWeights weights;
  double value = 0.0;
};

inline constexpr std::size_t kGridMaxAssets = 4;
inline constexpr int kGridMaxResolution = 200;

/// Brute-force maximum of g_n over {K : K_i = k_i / resolution}. Ties go to
/// the lexicographically smallest weight vector.
GridPoint grid_oracle(const JointReturnDistribution& dist, int n, int resolution);

}  // namespace kelly
