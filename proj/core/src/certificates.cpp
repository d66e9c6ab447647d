#include "kelly/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kelly/error.hpp"

namespace kelly {

namespace {

void require_exact(const CompoundReturnDistribution& compound, const char* op) {
  if (!compound.exact()) {
    throw DomainError(std::string(op) + " needs an exact compound distribution");
  }
}

void require_size(const CompoundReturnDistribution& compound, const PortfolioWeights& weights) {
  if (weights.size() != compound.asset_count()) {
    throw InputError("weights have " + std::to_string(weights.size()) +
                     " entries but the model has " + std::to_string(compound.asset_count()) +
                     " assets");
  }
}

// Expectations are divided by the total probability mass so that a ratio
// that is identically 1 evaluates to exactly 1.
double total_mass(const CompoundReturnDistribution& compound) {
  double total = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) total += compound.weight(s);
  return total;
}

double residual_for(double ratio, Condition condition) {
  return condition == Condition::equality ? std::abs(ratio - 1.0) : std::max(ratio - 1.0, 0.0);
}

}  // namespace

double expected_ratio_asset(const CompoundReturnDistribution& compound,
                            const PortfolioWeights& weights, std::size_t asset) {
  require_exact(compound, "expected_ratio_asset");
  require_size(compound, weights);
  if (asset >= compound.asset_count()) throw InputError("asset index out of range");
  double acc = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto x = compound.outcome(s);
    acc += compound.weight(s) * ((1.0 + x[asset]) / weights.gross(x));
  }
  return acc / total_mass(compound);
}

Vector expected_ratios(const CompoundReturnDistribution& compound, const PortfolioWeights& weights) {
  require_exact(compound, "expected_ratios");
  require_size(compound, weights);
  const std::size_t m = compound.asset_count();
  Vector acc(m, 0.0);
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto x = compound.outcome(s);
    const double p = compound.weight(s);
    const double denom = weights.gross(x);
    for (std::size_t i = 0; i < m; ++i) acc[i] += p * ((1.0 + x[i]) / denom);
  }
  const double total = total_mass(compound);
  for (double& a : acc) a /= total;
  return acc;
}

double kkt_residual(const CompoundReturnDistribution& compound, const PortfolioWeights& weights,
                    double support_epsilon) {
  const Vector ratios = expected_ratios(compound, weights);
  double worst = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto condition =
        weights[i] > support_epsilon ? Condition::equality : Condition::inequality;
    worst = std::max(worst, residual_for(ratios[i], condition));
  }
  return worst;
}

OptimalityCertificate kkt_certify(const CompoundReturnDistribution& compound,
                                  const PortfolioWeights& weights, double tolerance,
                                  double support_epsilon) {
  OptimalityCertificate cert;
  cert.tolerance = tolerance;
  cert.support_epsilon = support_epsilon;
  cert.pass = true;
  const Vector ratios = expected_ratios(compound, weights);
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    AssetVerdict verdict;
    verdict.ratio = ratios[i];
    verdict.condition = weights[i] > support_epsilon ? Condition::equality : Condition::inequality;
    verdict.residual = residual_for(verdict.ratio, verdict.condition);
    verdict.satisfied = verdict.residual <= tolerance;
    cert.max_residual = std::max(cert.max_residual, verdict.residual);
    cert.pass = cert.pass && verdict.satisfied;
    cert.assets.push_back(verdict);
  }
  return cert;
}

double dominance_condition(const JointReturnDistribution& dist, std::size_t i, std::size_t j) {
  if (i >= dist.asset_count() || j >= dist.asset_count()) {
    throw InputError("dominance_condition: asset index out of range");
  }
  if (i == j) return 1.0;
  double acc = 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < dist.scenario_count(); ++s) {
    const auto x = dist.scenario(s);
    acc += dist.probability(s) * ((1.0 + x[i]) / (1.0 + x[j]));
    total += dist.probability(s);
  }
  return acc / total;
}

DominanceReport find_dominant(const JointReturnDistribution& dist, double tolerance) {
  const std::size_t m = dist.asset_count();
  DominanceReport report;
  report.tolerance = tolerance;
  report.ratios.assign(m, Vector(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) report.ratios[i][j] = dominance_condition(dist, i, j);
  }
  for (std::size_t j = 0; j < m && !report.dominant; ++j) {
    bool dominant = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (i != j && report.ratios[i][j] > 1.0 + tolerance) {
        dominant = false;
        break;
      }
    }
    if (dominant) report.dominant = j;
  }
  return report;
}

double expected_relative_wealth(const CompoundReturnDistribution& compound,
                                const PortfolioWeights& weights,
                                const PortfolioWeights& reference) {
  require_exact(compound, "expected_relative_wealth");
  require_size(compound, weights);
  require_size(compound, reference);
  double acc = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto x = compound.outcome(s);
    acc += compound.weight(s) * (weights.gross(x) / reference.gross(x));
  }
  return acc / total_mass(compound);
}

double expected_log_relative_wealth(const CompoundReturnDistribution& compound,
                                    const PortfolioWeights& weights,
                                    const PortfolioWeights& reference) {
  require_exact(compound, "expected_log_relative_wealth");
  require_size(compound, weights);
  require_size(compound, reference);
  double acc = 0.0;
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto x = compound.outcome(s);
    acc += compound.weight(s) * std::log(weights.gross(x) / reference.gross(x));
  }
  return acc / total_mass(compound);
}

}  // namespace kelly
