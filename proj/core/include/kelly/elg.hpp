#pragma once

#include <span>

#include "kelly/returns_model.hpp"

namespace kelly {

/// Per-step expected log growth g_n(K) = (1/n) E[log(1 + K^T X_n)].
struct ElgValue {
  double value = 0.0;
  double std_error = 0.0;  // zero in exact mode
  CompoundReturnDistribution::Mode mode = CompoundReturnDistribution::Mode::exact;
};

/// log(1 + K^T x). Throws DomainError if the argument is not positive,
/// which only happens for return vectors outside the model.
double log_growth_realized(const PortfolioWeights& weights, std::span<const double> x);

/// Exact probability-weighted g_n(K) over an enumerated compound distribution.
ElgValue elg_exact(const CompoundReturnDistribution& compound, const PortfolioWeights& weights);

/// Monte Carlo estimate of g_n(K) with standard error
/// sd / sqrt(count) / n. Needs at least two samples.
ElgValue elg_mc(const CompoundReturnDistribution& compound, const PortfolioWeights& weights);

/// Gradient of g_n: component i is (1/n) E[X_n,i / (1 + K^T X_n)].
Vector elg_gradient(const CompoundReturnDistribution& compound, const PortfolioWeights& weights);

/// Raw expectation E[log(1 + v^T X_n)] / n for any v keeping every gross
/// return positive; used by the solver's line search on trial points.
double elg_exact_unchecked(const CompoundReturnDistribution& compound, std::span<const double> v);

}  // namespace kelly
