#pragma once

#include <vector>

#include "iadb/densities.hpp"
#include "iadb/rng.hpp"

namespace iadb::testing {

inline GaussianMixture normal1d(double mean, double stddev) {
  return GaussianMixture::single({mean}, {stddev});
}

/// Equal-weight 1D mixture from lists of means and a shared stddev.
inline GaussianMixture mixture1d(const std::vector<double>& means, double stddev) {
  std::vector<GaussianComponent> comps;
  const double w = 1.0 / static_cast<double>(means.size());
  for (double m : means) comps.push_back({w, {m}, {stddev}});
  return GaussianMixture(1, std::move(comps));
}

/// The bi-Normal of the 1D experiment: modes +-0.5, sigma 0.1.
inline GaussianMixture binormal_05() { return mixture1d({-0.5, 0.5}, 0.1); }
/// Its wide variant: modes +-0.9, sigma 0.3.
inline GaussianMixture binormal_09() { return mixture1d({-0.9, 0.9}, 0.3); }
/// The tri-Normal target: modes {-1, 0, 1}, sigma 0.1.
inline GaussianMixture trinormal() { return mixture1d({-1.0, 0.0, 1.0}, 0.1); }

/// Random small mixture for property tests: 1..4 components, means in
/// [-3,3], stddevs in [0.05, 1.5].
inline GaussianMixture random_mixture(int dim, Rng& rng) {
  const int n = 1 + static_cast<int>(rng.uniform_index(4));
  std::vector<GaussianComponent> comps;
  std::vector<double> w(n);
  double wsum = 0;
  for (int i = 0; i < n; ++i) {
    w[i] = rng.uniform(0.1, 1.0);
    wsum += w[i];
  }
  for (int i = 0; i < n; ++i) {
    Vec mean(dim), sd(dim);
    for (int k = 0; k < dim; ++k) {
      mean[k] = rng.uniform(-3.0, 3.0);
      sd[k] = rng.uniform(0.05, 1.5);
    }
    comps.push_back({w[i] / wsum, std::move(mean), std::move(sd)});
  }
  // Re-normalize exactly enough for the constructor's 1e-12 gate.
  double total = 0;
  for (auto& c : comps) total += c.weight;
  for (auto& c : comps) c.weight /= total;
  return GaussianMixture(dim, std::move(comps));
}

/// Stratified grid of k x k points over a rectangle.
inline std::vector<Vec> grid_points(double lo0, double hi0, double lo1, double hi1, int k) {
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      pts.push_back({lo0 + (i + 0.5) * (hi0 - lo0) / k, lo1 + (j + 0.5) * (hi1 - lo1) / k});
  return pts;
}

/// Kernelized stand-ins for the uniform square and disk (the stochastic
/// chain needs mixture-representable densities).
inline PointCloudDensity square_cloud(int k, double bandwidth) {
  return PointCloudDensity(grid_points(0.0, 1.0, 0.0, 1.0, k), bandwidth);
}

inline PointCloudDensity disk_cloud(int count, double bandwidth, std::uint64_t seed) {
  Rng rng(seed);
  UniformRegion disk{Disk{{0.5, 0.5}, 0.5}};
  std::vector<Vec> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(disk.sample(rng));
  return PointCloudDensity(std::move(pts), bandwidth);
}

}  // namespace iadb::testing
