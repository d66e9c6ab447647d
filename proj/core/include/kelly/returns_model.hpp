#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace kelly {

using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// A point of the unit simplex: long-only, fully invested weights.
class PortfolioWeights {
 public:
  static constexpr double kSumTolerance = 1e-10;

  /// Throws InputError unless every weight is finite and non-negative and
  /// the weights sum to 1 within kSumTolerance.
  explicit PortfolioWeights(Vector weights);

  static PortfolioWeights vertex(std::size_t asset_count, std::size_t index);
  static PortfolioWeights uniform(std::size_t asset_count);

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return weights_[i]; }
  [[nodiscard]] std::span<const double> values() const noexcept { return weights_; }
  [[nodiscard]] const Vector& vector() const noexcept { return weights_; }

  /// Dot product 1 + K^T x, the gross return of the portfolio on `x`.
  [[nodiscard]] double gross(std::span<const double> x) const;

  friend bool operator==(const PortfolioWeights&, const PortfolioWeights&) = default;

 private:
  Vector weights_;
};

/// Finite joint distribution of the one-step return vector X(k).
/// Immutable after construction.
class JointReturnDistribution {
 public:
  static constexpr double kProbabilityTolerance = 1e-9;

  /// Validates the scenario set and renormalizes probabilities to sum to 1.
  /// Throws InputError on empty or ragged input, non-positive probabilities,
  /// probabilities off 1 by more than kProbabilityTolerance, non-finite
  /// returns, or any return <= -1.
  JointReturnDistribution(std::vector<Vector> scenarios, Vector probabilities,
                          std::vector<std::string> asset_names = {});

  [[nodiscard]] std::size_t asset_count() const noexcept { return asset_count_; }
  [[nodiscard]] std::size_t scenario_count() const noexcept { return probabilities_.size(); }
  [[nodiscard]] std::span<const double> scenario(std::size_t s) const;
  [[nodiscard]] double probability(std::size_t s) const { return probabilities_.at(s); }
  [[nodiscard]] const Vector& probabilities() const noexcept { return probabilities_; }
  [[nodiscard]] double min_return(std::size_t i) const { return min_.at(i); }
  [[nodiscard]] double max_return(std::size_t i) const { return max_.at(i); }
  [[nodiscard]] const std::vector<std::string>& asset_names() const noexcept { return names_; }

  /// Index of the scenario selected by a uniform draw u in [0, 1).
  [[nodiscard]] std::size_t scenario_for(double u) const noexcept;

 private:
  std::size_t asset_count_ = 0;
  Vector returns_;  // row-major, scenario_count x asset_count
  Vector probabilities_;
  Vector cumulative_;
  Vector min_;
  Vector max_;
  std::vector<std::string> names_;
};

/// Appends a riskless asset paying `rate` in every scenario.
/// Throws InputError if rate is negative or not finite.
JointReturnDistribution with_riskless(const JointReturnDistribution& dist, double rate,
                                      std::string name = "riskless");

/// Distribution of the n-step compound return vector, either enumerated
/// exactly or drawn by Monte Carlo.
class CompoundReturnDistribution {
 public:
  enum class Mode { exact, sampled };

  [[nodiscard]] Mode mode() const noexcept { return mode_; }
  [[nodiscard]] bool exact() const noexcept { return mode_ == Mode::exact; }
  [[nodiscard]] int period() const noexcept { return period_; }
  [[nodiscard]] std::size_t asset_count() const noexcept { return asset_count_; }
  [[nodiscard]] std::size_t outcome_count() const noexcept { return weights_.size(); }
  [[nodiscard]] std::span<const double> outcome(std::size_t s) const {
    return {outcomes_.data() + s * asset_count_, asset_count_};
  }
  /// Probability of outcome s (exact mode) or 1/count (sampled mode).
  [[nodiscard]] double weight(std::size_t s) const { return weights_[s]; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

  friend CompoundReturnDistribution compound_exact(const JointReturnDistribution&, int,
                                                   std::size_t);
  friend CompoundReturnDistribution compound_sample(const JointReturnDistribution&, int,
                                                    std::size_t, std::uint64_t);

 private:
  CompoundReturnDistribution() = default;

  Mode mode_ = Mode::exact;
  int period_ = 1;
  std::size_t asset_count_ = 0;
  Vector outcomes_;  // row-major, outcome_count x asset_count
  Vector weights_;
  std::uint64_t seed_ = 0;
};

/// Exact product distribution of n i.i.d. steps. Identical compound outcome
/// vectors are merged for n >= 2; n == 1 reproduces the input scenarios.
/// Throws EnumerationCapExceeded when S^n > cap.
CompoundReturnDistribution compound_exact(const JointReturnDistribution& dist, int n,
                                          std::size_t cap = kDefaultEnumerationCap);

/// `count` independent compound return vectors, each built from n scenario
/// draws. Draw k of sample c depends only on (seed, c, k).
CompoundReturnDistribution compound_sample(const JointReturnDistribution& dist, int n,
                                           std::size_t count, std::uint64_t seed);

/// Simple returns (p[k+1] - p[k]) / p[k].
Vector returns_from_prices(std::span<const double> prices);

/// Lower bound (1 + min_return)^n - 1 on an n-step compound return, using
/// the same multiplication order as compounding so the bound holds bit-exactly.
[[nodiscard]] double compound_floor(double min_return, int n);

/// True when S^n <= cap, computed without overflow.
[[nodiscard]] bool enumerable(std::size_t scenario_count, int n,
                              std::size_t cap = kDefaultEnumerationCap) noexcept;

}  // namespace kelly
