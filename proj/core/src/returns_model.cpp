#include "kelly/returns_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "kelly/error.hpp"
#include "kelly/random.hpp"

namespace kelly {

namespace {

std::string asset_label(std::size_t i) { return "asset" + std::to_string(i + 1); }

// Exact-bit hash of a gross-return vector, used to merge identical outcomes.
struct BitsHash {
  std::size_t operator()(const Vector& v) const noexcept {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (double d : v) h = CounterRng::mix(h ^ std::bit_cast<std::uint64_t>(d));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

PortfolioWeights::PortfolioWeights(Vector weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("portfolio weights: empty vector");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError("portfolio weights: entry " + std::to_string(i) +
                       " is negative or not finite");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InputError("portfolio weights: sum " + std::to_string(sum) + " is not 1");
  }
}

PortfolioWeights PortfolioWeights::vertex(std::size_t asset_count, std::size_t index) {
  if (index >= asset_count) throw InputError("vertex index out of range");
  Vector w(asset_count, 0.0);
  w[index] = 1.0;
  return PortfolioWeights(std::move(w));
}

PortfolioWeights PortfolioWeights::uniform(std::size_t asset_count) {
  if (asset_count == 0) throw InputError("uniform weights: zero assets");
  return PortfolioWeights(Vector(asset_count, 1.0 / static_cast<double>(asset_count)));
}

double PortfolioWeights::gross(std::span<const double> x) const {
  if (x.size() != weights_.size()) throw InputError("return vector has wrong length");
  double acc = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * x[i];
  return acc;
}

JointReturnDistribution::JointReturnDistribution(std::vector<Vector> scenarios,
                                                 Vector probabilities,
                                                 std::vector<std::string> asset_names) {
  if (scenarios.empty()) throw InputError("distribution: no scenarios");
  if (scenarios.size() != probabilities.size()) {
    throw InputError("distribution: " + std::to_string(scenarios.size()) + " scenarios but " +
                     std::to_string(probabilities.size()) + " probabilities");
  }
  asset_count_ = scenarios.front().size();
  if (asset_count_ == 0) throw InputError("distribution: scenarios have no assets");
  if (!asset_names.empty() && asset_names.size() != asset_count_) {
    throw InputError("distribution: asset name count does not match scenario length");
  }

  min_.assign(asset_count_, std::numeric_limits<double>::infinity());
  max_.assign(asset_count_, -std::numeric_limits<double>::infinity());
  returns_.reserve(scenarios.size() * asset_count_);
  double total = 0.0;
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    if (scenarios[s].size() != asset_count_) {
      throw InputError("distribution: scenario " + std::to_string(s) + " has length " +
                       std::to_string(scenarios[s].size()) + ", expected " +
                       std::to_string(asset_count_));
    }
    const double p = probabilities[s];
    if (!std::isfinite(p) || p <= 0.0 || p > 1.0) {
      throw InputError("distribution: probability " + std::to_string(s) +
                       " must lie in (0, 1]");
    }
    total += p;
    for (std::size_t i = 0; i < asset_count_; ++i) {
      const double x = scenarios[s][i];
      if (!std::isfinite(x)) {
        throw InputError("distribution: return (" + std::to_string(s) + ", " +
                         std::to_string(i) + ") is not finite");
      }
      if (x <= -1.0) {
        throw InputError("distribution: return (" + std::to_string(s) + ", " +
                         std::to_string(i) + ") is <= -1");
      }
      min_[i] = std::min(min_[i], x);
      max_[i] = std::max(max_[i], x);
      returns_.push_back(x);
    }
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw InputError("distribution: probabilities sum to " + std::to_string(total));
  }
  probabilities_ = std::move(probabilities);
  // Skipped when already normalized to rounding, so re-reading a written
  // model reproduces it bit for bit.
  if (std::abs(total - 1.0) > 1e-14) {
    for (double& p : probabilities_) p /= total;
  }

  cumulative_.resize(probabilities_.size());
  std::partial_sum(probabilities_.begin(), probabilities_.end(), cumulative_.begin());
  cumulative_.back() = 1.0;

  if (asset_names.empty()) {
    for (std::size_t i = 0; i < asset_count_; ++i) asset_names.push_back(asset_label(i));
  }
  names_ = std::move(asset_names);
}

std::span<const double> JointReturnDistribution::scenario(std::size_t s) const {
  if (s >= scenario_count()) throw InputError("scenario index out of range");
  return {returns_.data() + s * asset_count_, asset_count_};
}

std::size_t JointReturnDistribution::scenario_for(double u) const noexcept {
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

JointReturnDistribution with_riskless(const JointReturnDistribution& dist, double rate,
                                      std::string name) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw InputError("riskless rate must be finite and non-negative");
  }
  std::vector<Vector> scenarios;
  scenarios.reserve(dist.scenario_count());
  for (std::size_t s = 0; s < dist.scenario_count(); ++s) {
    const auto row = dist.scenario(s);
    Vector extended(row.begin(), row.end());
    extended.push_back(rate);
    scenarios.push_back(std::move(extended));
  }
  auto names = dist.asset_names();
  names.push_back(std::move(name));
  return JointReturnDistribution(std::move(scenarios), dist.probabilities(), std::move(names));
}

bool enumerable(std::size_t scenario_count, int n, std::size_t cap) noexcept {
  if (n < 1) return false;
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) {
    if (scenario_count != 0 && total > cap / scenario_count) return false;
    total *= scenario_count;
  }
  return total <= cap;
}

CompoundReturnDistribution compound_exact(const JointReturnDistribution& dist, int n,
                                          std::size_t cap) {
  if (n < 1) throw InputError("compound period must be >= 1");
  const std::size_t m = dist.asset_count();
  const std::size_t scenarios = dist.scenario_count();
  if (!enumerable(scenarios, n, cap)) {
    throw EnumerationCapExceeded("exact compounding needs " + std::to_string(scenarios) + "^" +
                                 std::to_string(n) + " outcomes, above the cap of " +
                                 std::to_string(cap) + "; use sampling");
  }

  CompoundReturnDistribution out;
  out.mode_ = CompoundReturnDistribution::Mode::exact;
  out.period_ = n;
  out.asset_count_ = m;

  if (n == 1) {
    for (std::size_t s = 0; s < scenarios; ++s) {
      const auto row = dist.scenario(s);
      out.outcomes_.insert(out.outcomes_.end(), row.begin(), row.end());
    }
    out.weights_ = dist.probabilities();
    return out;
  }

  // Gross factors prod(1 + X) built one step at a time; identical partial
  // products are merged, which yields the same bits as merging at the end.
  std::vector<Vector> gross;
  Vector probs;
  for (std::size_t s = 0; s < scenarios; ++s) {
    const auto row = dist.scenario(s);
    Vector g(m);
    for (std::size_t i = 0; i < m; ++i) g[i] = 1.0 + row[i];
    gross.push_back(std::move(g));
    probs.push_back(dist.probability(s));
  }

  for (int step = 1; step < n; ++step) {
    std::vector<Vector> next;
    Vector next_probs;
    std::unordered_map<Vector, std::size_t, BitsHash> index;
    next.reserve(gross.size() * scenarios);
    index.reserve(gross.size() * scenarios);
    for (std::size_t c = 0; c < gross.size(); ++c) {
      for (std::size_t s = 0; s < scenarios; ++s) {
        const auto row = dist.scenario(s);
        Vector g(m);
        for (std::size_t i = 0; i < m; ++i) g[i] = gross[c][i] * (1.0 + row[i]);
        const double p = probs[c] * dist.probability(s);
        auto [it, inserted] = index.try_emplace(g, next.size());
        if (inserted) {
          next.push_back(std::move(g));
          next_probs.push_back(p);
        } else {
          next_probs[it->second] += p;
        }
      }
    }
    gross = std::move(next);
    probs = std::move(next_probs);
  }

  out.outcomes_.reserve(gross.size() * m);
  for (const auto& g : gross) {
    for (double v : g) out.outcomes_.push_back(v - 1.0);
  }
  out.weights_ = std::move(probs);
  return out;
}

CompoundReturnDistribution compound_sample(const JointReturnDistribution& dist, int n,
                                           std::size_t count, std::uint64_t seed) {
  if (n < 1) throw InputError("compound period must be >= 1");
  if (count < 1) throw InputError("sample count must be >= 1");
  const std::size_t m = dist.asset_count();

  CompoundReturnDistribution out;
  out.mode_ = CompoundReturnDistribution::Mode::sampled;
  out.period_ = n;
  out.asset_count_ = m;
  out.seed_ = seed;
  out.outcomes_.resize(count * m);
  out.weights_.assign(count, 1.0 / static_cast<double>(count));

  Vector g(m);
  for (std::size_t c = 0; c < count; ++c) {
    const CounterRng rng(seed, c);
    double* dst = out.outcomes_.data() + c * m;
    if (n == 1) {
      const auto row = dist.scenario(dist.scenario_for(rng.uniform(0)));
      std::copy(row.begin(), row.end(), dst);
      continue;
    }
    for (int k = 0; k < n; ++k) {
      const auto row = dist.scenario(dist.scenario_for(rng.uniform(static_cast<std::uint64_t>(k))));
      for (std::size_t i = 0; i < m; ++i) g[i] = (k == 0 ? 1.0 + row[i] : g[i] * (1.0 + row[i]));
    }
    for (std::size_t i = 0; i < m; ++i) dst[i] = g[i] - 1.0;
  }
  return out;
}

double compound_floor(double min_return, int n) {
  if (n == 1) return min_return;
  const double base = 1.0 + min_return;
  double g = base;
  for (int k = 1; k < n; ++k) g *= base;
  return g - 1.0;
}

Vector returns_from_prices(std::span<const double> prices) {
  if (prices.size() < 2) throw InputError("need at least 2 prices to form a return");
  for (std::size_t k = 0; k < prices.size(); ++k) {
    if (!std::isfinite(prices[k]) || prices[k] <= 0.0) {
      throw InputError("price at index " + std::to_string(k) + " is not strictly positive");
    }
  }
  Vector out(prices.size() - 1);
  for (std::size_t k = 0; k + 1 < prices.size(); ++k) {
    out[k] = (prices[k + 1] - prices[k]) / prices[k];
  }
  return out;
}

}  // namespace kelly
