// Shared helpers for the test suites: random specs over documented ranges
// and small oracles that do not go through the library's code paths.
#pragma once

#include "slicenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace slicenet::testing {

/// b in [b_lo, 5], d sorted in [1, 10], g in [0, 20].
struct SpecRanges {
  double b_lo = 0.05, b_hi = 5.0;
  double d_lo = 1.0, d_hi = 10.0;
  double g_lo = 0.0, g_hi = 20.0;
};

inline NetworkSpec random_spec(std::mt19937_64& rng, std::size_t n, SpecRanges r = {}) {
  std::uniform_real_distribution<double> b(r.b_lo, r.b_hi), d(r.d_lo, r.d_hi), g(r.g_lo, r.g_hi);
  std::vector<double> bs(n), ds(n), gs(n);
  for (auto& x : bs) x = b(rng);
  for (auto& x : ds) x = d(rng);
  for (auto& x : gs) x = g(rng);
  std::sort(ds.begin(), ds.end());
  return NetworkSpec(bs, ds, gs);
}

/// Uniform random strategy with p_0 = 0.
inline Strategy random_strategy(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Strategy s{std::vector<double>(n, 0.0)};
  for (std::size_t i = 1; i < n; ++i) s.p[i] = u(rng);
  return s;
}

/// Exact optimum for two slices. Slice 0's per-sensor energy grows with p
/// and slice 1's shrinks (d_1 >= 1), so the minimax sits at an endpoint or
/// at the crossing, found here by bisection.
struct TwoSliceOptimum {
  double p;
  double peak;
};

inline TwoSliceOptimum two_slice_minimax(const NetworkSpec& s) {
  auto near = [&](double p) {
    return (s.generated(0) + p * s.generated(1)) * s.distance(0) * s.distance(0) / s.battery(0);
  };
  auto far = [&](double p) {
    const double d2 = s.distance(1) * s.distance(1);
    return s.generated(1) * (p + (1.0 - p) * d2) / s.battery(1);
  };
  auto peak = [&](double p) { return std::max(near(p), far(p)); };
  if (near(0.0) >= far(0.0)) return {0.0, peak(0.0)};
  if (near(1.0) <= far(1.0)) return {1.0, peak(1.0)};
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (near(mid) < far(mid) ? lo : hi) = mid;
  }
  const double p = 0.5 * (lo + hi);
  return {p, peak(p)};
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace slicenet::testing
