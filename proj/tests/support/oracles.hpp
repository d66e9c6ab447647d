#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "kelly/returns_model.hpp"

namespace kelly::testing {

/// Visits every n-tuple of scenarios (no merging) with its compound return
/// vector and probability. Independent of compound_exact.
inline void for_each_path(const JointReturnDistribution& dist, int n,
                          const std::function<void(const Vector&, double)>& visit) {
  const std::size_t m = dist.asset_count();
  std::function<void(int, Vector, double)> recurse = [&](int depth, Vector gross, double p) {
    if (depth == n) {
      Vector x(m);
      for (std::size_t i = 0; i < m; ++i) x[i] = gross[i] - 1.0;
      visit(x, p);
      return;
    }
    for (std::size_t s = 0; s < dist.scenario_count(); ++s) {
      Vector g = gross;
      for (std::size_t i = 0; i < m; ++i) g[i] *= 1.0 + dist.scenario(s)[i];
      recurse(depth + 1, std::move(g), p * dist.probability(s));
    }
  };
  recurse(0, Vector(m, 1.0), 1.0);
}

/// g_n(v) = (1/n) E[log(1 + v^T X_n)] by brute-force path enumeration.
inline double brute_elg(const JointReturnDistribution& dist, int n, std::span<const double> v) {
  double acc = 0.0;
  for_each_path(dist, n, [&](const Vector& x, double p) {
    double gross = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) gross += v[i] * x[i];
    acc += p * std::log(gross);
  });
  return acc / n;
}

/// Maximizes f on [0, 1] by a dense grid followed by golden-section refinement.
inline double maximize_on_unit_interval(const std::function<double(double)>& f) {
  constexpr int kGrid = 2000;
  int best = 0;
  for (int k = 1; k <= kGrid; ++k) {
    if (f(k / double(kGrid)) > f(best / double(kGrid))) best = k;
  }
  double lo = std::max(0.0, (best - 1) / double(kGrid));
  double hi = std::min(1.0, (best + 1) / double(kGrid));
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - phi * (hi - lo);
    const double b = lo + phi * (hi - lo);
    if (f(a) < f(b)) lo = a; else hi = b;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kelly::testing
