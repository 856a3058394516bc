#pragma once

// Brute-force quadrature oracle for 1D posterior expectations and quantiles.
// Deliberately independent of the closed-form Gaussian conditioning it
// checks: it only evaluates density values along the blend constraint
// x = (1-a) x0 + a x1, i.e. x1 = (x - (1-a) x0) / a, and integrates the
// unnormalized posterior p0(x0) p1(x1(x0)) over a midpoint grid in x0.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "iadb/densities.hpp"

namespace iadb::testing {

struct QuadStats {
  double xbar0 = 0;
  double xbar1 = 0;
  double diff() const { return xbar1 - xbar0; }
};

inline QuadStats quad_posterior_stats_1d(const Density& p0, const Density& p1, double x,
                                         double alpha, std::size_t nodes) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quad oracle: alpha must be in (0,1]");
  const BoundingBox box = bounding_box(p0, 12.0);
  const double lo = box.lo[0], hi = box.hi[0];
  const double h = (hi - lo) / static_cast<double>(nodes);
  double wsum = 0, s0 = 0, s1 = 0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = lo + (static_cast<double>(k) + 0.5) * h;
    const double u = (x - (1.0 - alpha) * t) / alpha;
    const double w = pdf(p0, {t}) * pdf(p1, {u});
    wsum += w;
    s0 += w * t;
    s1 += w * u;
  }
  if (!(wsum > 0)) throw std::runtime_error("quad oracle: no posterior mass");
  return {s0 / wsum, s1 / wsum};
}

/// Quantile of the posterior difference x1 - x0 along the same grid. The
/// difference (x - x0)/alpha is strictly decreasing in x0, so the q-quantile
/// of the difference sits where the right-tail mass in x0 reaches q.
inline double quad_posterior_diff_quantile_1d(const Density& p0, const Density& p1, double x,
                                              double alpha, double q, std::size_t nodes) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quad oracle: alpha must be in (0,1]");
  const BoundingBox box = bounding_box(p0, 12.0);
  const double lo = box.lo[0], hi = box.hi[0];
  const double h = (hi - lo) / static_cast<double>(nodes);
  std::vector<double> w(nodes);
  double wsum = 0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = lo + (static_cast<double>(k) + 0.5) * h;
    const double u = (x - (1.0 - alpha) * t) / alpha;
    w[k] = pdf(p0, {t}) * pdf(p1, {u});
    wsum += w[k];
  }
  if (!(wsum > 0)) throw std::runtime_error("quad oracle: no posterior mass");
  double acc = 0;
  for (std::size_t k = nodes; k-- > 0;) {
    acc += w[k];
    if (acc >= q * wsum) {
      const double t = lo + (static_cast<double>(k) + 0.5) * h;
      return (x - t) / alpha;
    }
  }
  return (x - (lo + 0.5 * h)) / alpha;
}

}  // namespace iadb::testing
