#include "kelly/elg.hpp"

#include <cmath>
#include <string>

#include "kelly/error.hpp"

namespace kelly {

namespace {

void require_mode(const CompoundReturnDistribution& compound, CompoundReturnDistribution::Mode mode,
                  const char* op) {
  if (compound.mode() != mode) {
    throw DomainError(std::string(op) + ": compound distribution is in " +
                      (compound.exact() ? "exact" : "sampled") + " mode");
  }
}

void require_size(const CompoundReturnDistribution& compound, std::size_t m) {
  if (compound.asset_count() != m) {
    throw InputError("weights have " + std::to_string(m) + " entries but the model has " +
                     std::to_string(compound.asset_count()) + " assets");
  }
}

double gross_of(std::span<const double> v, std::span<const double> x) {
  double acc = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += v[i] * x[i];
  return acc;
}

}  // namespace

double log_growth_realized(const PortfolioWeights& weights, std::span<const double> x) {
  const double g = weights.gross(x);
  if (!(g > 0.0)) throw DomainError("log growth: 1 + K^T x is not positive");
  return std::log(g);
}

double elg_exact_unchecked(const CompoundReturnDistribution& compound, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    acc += compound.weight(s) * std::log(gross_of(v, compound.outcome(s)));
  }
  return acc / compound.period();
}

ElgValue elg_exact(const CompoundReturnDistribution& compound, const PortfolioWeights& weights) {
  require_mode(compound, CompoundReturnDistribution::Mode::exact, "elg_exact");
  require_size(compound, weights.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    acc += compound.weight(s) * log_growth_realized(weights, compound.outcome(s));
  }
  return {acc / compound.period(), 0.0, CompoundReturnDistribution::Mode::exact};
}

ElgValue elg_mc(const CompoundReturnDistribution& compound, const PortfolioWeights& weights) {
  require_mode(compound, CompoundReturnDistribution::Mode::sampled, "elg_mc");
  require_size(compound, weights.size());
  const std::size_t count = compound.outcome_count();
  if (count < 2) throw InputError("elg_mc: need at least 2 samples");

  // Welford keeps the variance exact (zero) for constant samples.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const double x = log_growth_realized(weights, compound.outcome(s));
    const double delta = x - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (x - mean);
  }
  const double sd = std::sqrt(m2 / static_cast<double>(count - 1));
  const double n = compound.period();
  return {mean / n, sd / std::sqrt(static_cast<double>(count)) / n,
          CompoundReturnDistribution::Mode::sampled};
}

Vector elg_gradient(const CompoundReturnDistribution& compound, const PortfolioWeights& weights) {
  require_mode(compound, CompoundReturnDistribution::Mode::exact, "elg_gradient");
  require_size(compound, weights.size());
  const std::size_t m = compound.asset_count();
  Vector grad(m, 0.0);
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto x = compound.outcome(s);
    const double scale = compound.weight(s) / weights.gross(x);
    for (std::size_t i = 0; i < m; ++i) grad[i] += scale * x[i];
  }
  for (double& g : grad) g /= compound.period();
  return grad;
}

}  // namespace kelly
