#include "kelly/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "kelly/elg.hpp"
#include "kelly/error.hpp"

namespace kelly {

namespace {

constexpr double kMinStep = 1e-30;
constexpr double kMaxStep = 1e12;

double checked_objective(const CompoundReturnDistribution& compound, std::span<const double> v) {
  const double f = elg_exact_unchecked(compound, v);
  if (!std::isfinite(f)) throw DomainError("solve: objective is not finite");
  return f;
}

// Newton direction for g_n restricted to the face spanned by the support,
// from [H 1; 1^T 0] [d; lambda] = [-g; 0]. Empty if the system is singular.
std::optional<Vector> face_newton_direction(const CompoundReturnDistribution& compound,
                                            const PortfolioWeights& x, double support_eps) {
  const std::size_t m = compound.asset_count();
  std::vector<std::size_t> face;
  for (std::size_t i = 0; i < m; ++i) {
    if (x[i] > support_eps) face.push_back(i);
  }
  const std::size_t k = face.size();
  if (k < 2) return std::nullopt;

  // Augmented (k + 1) x (k + 2) system, row-major.
  const std::size_t cols = k + 2;
  Vector a((k + 1) * cols, 0.0);
  for (std::size_t s = 0; s < compound.outcome_count(); ++s) {
    const auto out = compound.outcome(s);
    const double r = x.gross(out);
    const double w = compound.weight(s) / r;
    for (std::size_t p = 0; p < k; ++p) {
      const double xp = out[face[p]];
      a[p * cols + k + 1] -= w * xp;
      for (std::size_t q = 0; q < k; ++q) a[p * cols + q] -= w * xp * out[face[q]] / r;
    }
  }
  double scale = 0.0;
  for (std::size_t p = 0; p < k; ++p) {
    a[p * cols + k] = 1.0;
    a[k * cols + p] = 1.0;
    scale = std::max(scale, std::abs(a[p * cols + p]));
  }

  for (std::size_t c = 0; c <= k; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r <= k; ++r) {
      if (std::abs(a[r * cols + c]) > std::abs(a[pivot * cols + c])) pivot = r;
    }
    if (std::abs(a[pivot * cols + c]) <= 1e-13 * std::max(scale, 1.0)) return std::nullopt;
    if (pivot != c) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[c * cols + j], a[pivot * cols + j]);
    }
    for (std::size_t r = 0; r <= k; ++r) {
      if (r == c) continue;
      const double factor = a[r * cols + c] / a[c * cols + c];
      if (factor == 0.0) continue;
      for (std::size_t j = c; j < cols; ++j) a[r * cols + j] -= factor * a[c * cols + j];
    }
  }
  Vector d(m, 0.0);
  for (std::size_t p = 0; p < k; ++p) d[face[p]] = a[p * cols + k + 1] / a[p * cols + p];
  return d;
}

}  // namespace

PortfolioWeights project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw InputError("project_to_simplex: empty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw InputError("project_to_simplex: non-finite entry");
  }

  const bool nonnegative = std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  if (nonnegative && std::abs(sum - 1.0) <= 4.0 * v.size() * std::numeric_limits<double>::epsilon()) {
    return PortfolioWeights(Vector(v.begin(), v.end()));
  }

  Vector sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) threshold = candidate;
  }

  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - threshold, 0.0);
  return PortfolioWeights(std::move(out));
}

OptimizationResult solve(const JointReturnDistribution& dist, int n, const SolveOptions& opts) {
  return solve(compound_exact(dist, n, opts.enumeration_cap), opts);
}

OptimizationResult solve(const CompoundReturnDistribution& compound, const SolveOptions& opts) {
  if (!compound.exact()) throw DomainError("solve needs an exact compound distribution");
  if (opts.max_iterations < 0) throw InputError("solve: max_iterations must be >= 0");
  if (!(opts.shrink > 0.0 && opts.shrink < 1.0)) throw InputError("solve: shrink must lie in (0, 1)");
  if (!(opts.initial_step > 0.0)) throw InputError("solve: initial_step must be positive");

  const std::size_t m = compound.asset_count();
  PortfolioWeights x = PortfolioWeights::uniform(m);
  double f = checked_objective(compound, x.values());
  double residual = kkt_residual(compound, x, opts.support_epsilon);
  double step = opts.initial_step;
  int iteration = 0;

  Vector trial(m);
  while (residual > opts.kkt_tolerance && iteration < opts.max_iterations) {
    const Vector grad = elg_gradient(compound, x);

    double t = step;
    bool accepted = false;
    while (t >= kMinStep) {
      for (std::size_t i = 0; i < m; ++i) trial[i] = x[i] + t * grad[i];
      PortfolioWeights y = project_to_simplex(trial);
      double ascent = 0.0;
      for (std::size_t i = 0; i < m; ++i) ascent += grad[i] * (y[i] - x[i]);
      if (y == x || ascent <= 0.0) break;  // projected gradient vanished numerically

      const double fy = checked_objective(compound, y.values());
      if (fy >= f + opts.sufficient_increase * ascent) {
        x = std::move(y);
        f = fy;
        accepted = true;
        break;
      }
      t *= opts.shrink;
    }
    if (!accepted) {
      // Near the optimum objective differences fall below rounding and the
      // line search stalls; a Newton step on the support face still makes
      // progress measured by the residual.
      const auto d = face_newton_direction(compound, x, opts.support_epsilon);
      if (!d) break;
      for (std::size_t i = 0; i < m; ++i) trial[i] = x[i] + (*d)[i];
      PortfolioWeights y = project_to_simplex(trial);
      const double fy = elg_exact_unchecked(compound, y.values());
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
      if (!std::isfinite(fy) || fy < f - noise) break;
      const double ry = kkt_residual(compound, y, opts.support_epsilon);
      if (!(ry < residual)) break;
      x = std::move(y);
      f = fy;
      t = 1.0;
    }

    ++iteration;
    residual = kkt_residual(compound, x, opts.support_epsilon);
    if (opts.observer) opts.observer({iteration, &x, f, t, residual});
    step = std::min(2.0 * t, kMaxStep);
  }

  OptimizationResult result{x, f, iteration, residual, residual <= opts.kkt_tolerance};
  return result;
}

GridPoint grid_oracle(const JointReturnDistribution& dist, int n, int resolution) {
  const std::size_t m = dist.asset_count();
  if (m > kGridMaxAssets) {
    throw InputError("grid_oracle: at most " + std::to_string(kGridMaxAssets) + " assets");
  }
  if (resolution < 1 || resolution > kGridMaxResolution) {
    throw InputError("grid_oracle: resolution must lie in [1, " +
                     std::to_string(kGridMaxResolution) + "]");
  }
  const auto compound = compound_exact(dist, n);

  // Odometer over the first m - 1 counts in lexicographic order; the last
  // count takes the remainder, so the full vectors are visited in order too.
  std::vector<int> counts(m, 0);
  counts.back() = resolution;
  Vector point(m);
  const double scale = static_cast<double>(resolution);

  std::vector<int> best_counts;
  double best_value = -std::numeric_limits<double>::infinity();
  while (true) {
    for (std::size_t i = 0; i < m; ++i) point[i] = counts[i] / scale;
    const double value = elg_exact_unchecked(compound, point);
    if (value > best_value) {
      best_value = value;
      best_counts = counts;
    }

    bool advanced = false;
    for (std::size_t slot = m - 1; slot-- > 0;) {
      if (counts.back() > 0) {
        ++counts[slot];
        --counts.back();
        advanced = true;
        break;
      }
      counts.back() += counts[slot];
      counts[slot] = 0;
    }
    if (!advanced) break;
  }

  Vector weights(m);
  for (std::size_t i = 0; i < m; ++i) weights[i] = best_counts[i] / scale;
  return {PortfolioWeights(std::move(weights)), best_value};
}

}  // namespace kelly
