#include "kelly/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kelly/error.hpp"
#include "kelly/random.hpp"

namespace kelly {

namespace {

void require_size(const JointReturnDistribution& dist, const PortfolioWeights& weights) {
  if (weights.size() != dist.asset_count()) {
    throw InputError("weights have " + std::to_string(weights.size()) +
                     " entries but the model has " + std::to_string(dist.asset_count()) +
                     " assets");
  }
}

}  // namespace

PathEnsemble::PathEnsemble(std::size_t paths, std::size_t horizon, std::uint64_t seed,
                           Vector values)
    : paths_(paths), horizon_(horizon), seed_(seed), values_(std::move(values)) {
  if (values_.size() != paths_ * horizon_) throw InputError("ensemble: value count mismatch");
}

PathEnsemble simulate_relative_paths(const JointReturnDistribution& dist,
                                     const PortfolioWeights& weights,
                                     const PortfolioWeights& reference, std::size_t horizon,
                                     std::size_t paths, std::uint64_t seed) {
  require_size(dist, weights);
  require_size(dist, reference);
  if (horizon < 2) throw InputError("simulate: horizon must be >= 2");
  if (paths < 1) throw InputError("simulate: paths must be >= 1");

  Vector values(paths * horizon);
  for (std::size_t p = 0; p < paths; ++p) {
    const CounterRng rng(seed, p);
    double cumulative = 0.0;
    double* row = values.data() + p * horizon;
    for (std::size_t k = 0; k < horizon; ++k) {
      const auto x = dist.scenario(dist.scenario_for(rng.uniform(k)));
      const double a = weights.gross(x);
      const double b = reference.gross(x);
      if (!(a > 0.0 && b > 0.0)) throw DomainError("simulate: non-positive gross return");
      cumulative += std::log(a / b);
      row[k] = cumulative / static_cast<double>(k + 1);
    }
  }
  return PathEnsemble(paths, horizon, seed, std::move(values));
}

double asymptotic_bound(std::size_t n) {
  const double nn = static_cast<double>(n);
  return 2.0 * std::log(nn) / nn;
}

std::size_t BoundViolations::violations_from(std::size_t from) const {
  std::size_t total = 0;
  for (std::size_t n = std::max<std::size_t>(from, 1); n <= counts.size(); ++n) {
    total += counts[n - 1];
  }
  return total;
}

BoundViolations check_asymptotic_bound(const PathEnsemble& ensemble) {
  BoundViolations out;
  out.paths = ensemble.paths();
  out.counts.assign(ensemble.horizon(), 0);
  for (std::size_t n = 1; n <= ensemble.horizon(); ++n) {
    const double bound = asymptotic_bound(n);
    std::size_t count = 0;
    for (std::size_t p = 0; p < ensemble.paths(); ++p) {
      if (ensemble.value(p, n) > bound) ++count;
    }
    out.counts[n - 1] = count;
    if (count > 0) out.last_violation = n;
  }
  out.tail_fraction = out.fraction(ensemble.horizon());
  return out;
}

std::vector<EnsembleSummaryRow> summarize(const PathEnsemble& ensemble) {
  const auto violations = check_asymptotic_bound(ensemble);
  std::vector<EnsembleSummaryRow> rows;
  rows.reserve(ensemble.horizon());
  for (std::size_t n = 1; n <= ensemble.horizon(); ++n) {
    EnsembleSummaryRow row;
    row.n = n;
    row.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (std::size_t p = 0; p < ensemble.paths(); ++p) {
      const double v = ensemble.value(p, n);
      sum += v;
      row.max = std::max(row.max, v);
    }
    row.mean = sum / static_cast<double>(ensemble.paths());
    row.violation_fraction = violations.fraction(n);
    rows.push_back(row);
  }
  return rows;
}

CrossSection cross_section(const PathEnsemble& ensemble, std::size_t n) {
  if (n < 1 || n > ensemble.horizon()) throw InputError("cross_section: step out of range");
  const std::size_t count = ensemble.paths();
  double sum = 0.0;
  for (std::size_t p = 0; p < count; ++p) sum += ensemble.value(p, n);
  const double mean = sum / static_cast<double>(count);
  if (count < 2) return {mean, 0.0};
  double ss = 0.0;
  for (std::size_t p = 0; p < count; ++p) {
    const double d = ensemble.value(p, n) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(count - 1));
  return {mean, sd / std::sqrt(static_cast<double>(count))};
}

AccountTrajectory account_trajectory(const JointReturnDistribution& dist,
                                     const PortfolioWeights& weights, double initial_value,
                                     std::size_t horizon, std::uint64_t seed) {
  require_size(dist, weights);
  if (!(initial_value > 0.0) || !std::isfinite(initial_value)) {
    throw InputError("account_trajectory: initial value must be positive");
  }
  const std::size_t m = dist.asset_count();
  const CounterRng rng(seed, 0);

  AccountTrajectory out{initial_value, {}, weights};
  out.values.reserve(horizon + 1);
  out.values.push_back(initial_value);
  // Summing K_i * prod(1 + x_i) equals 1 + K^T X but keeps deep drawdowns
  // from cancelling to zero.
  Vector gross(m, 1.0);
  for (std::size_t k = 0; k < horizon; ++k) {
    const auto x = dist.scenario(dist.scenario_for(rng.uniform(k)));
    double value = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      gross[i] *= 1.0 + x[i];
      value += weights[i] * gross[i];
    }
    out.values.push_back(value * initial_value);
  }
  return out;
}

double survival_lower_bound(const JointReturnDistribution& dist, const PortfolioWeights& weights,
                            int n) {
  require_size(dist, weights);
  if (n < 1) throw InputError("survival_lower_bound: n must be >= 1");
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dist.asset_count(); ++i) {
    worst = std::min(worst, std::pow(1.0 + dist.min_return(i), n));
  }
  return worst;
}

}  // namespace kelly
