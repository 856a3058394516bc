#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "iadb/densities.hpp"
#include "iadb/vec.hpp"

namespace iadb {

struct Histogram1d {
  double lo = 0.0;
  double hi = 1.0;
  int bin_count = 0;
  std::vector<std::int64_t> counts;

  static Histogram1d build(const std::vector<double>& samples, double lo, double hi, int bins);
  double bin_center(int b) const;
};

/// Histogram dump: header then one "bin_center,count" row per bin.
void write_histogram_csv(const Histogram1d& h, const std::filesystem::path& path);

/// count independent draws of (1-alpha)x0 + alpha*x1 with (x0,x1) ~ p0 x p1.
std::vector<Vec> blended_reference(const Density& p0, const Density& p1, double alpha,
                                   std::size_t count, Rng& rng);

/// Exact empirical 1-Wasserstein distance between equal-size sample sets:
/// mean absolute difference of the sorted samples.
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

/// Equal-size W1 after uniformly subsampling the larger set.
double wasserstein1_1d_resampled(std::vector<double> a, std::vector<double> b, Rng& rng);

/// Average of 1D W1 over random unit projections of two 2D sample sets.
double sliced_wasserstein(const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
                          Rng& rng);

struct ConvergenceRecord {
  int T = 0;
  double mean_endpoint_deviation = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRecord> records;
};

/// For each T, runs the stochastic chain `chains_per_start` times per start
/// and the deterministic chain (analytic oracle, Euler, same uniform
/// schedule) once per start, and records the mean Euclidean endpoint
/// deviation.
ConvergenceReport convergence_study(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                    const std::vector<Vec>& starts, const std::vector<int>& Ts,
                                    int chains_per_start, Rng& rng);

struct CheckerboardLabels {
  std::vector<int> labels;        // cell parity per point
  std::vector<std::uint8_t> clamped;  // 1 where the point fell outside [0,1]^2
};

/// Parity label ((floor(u*cells) + floor(v*cells)) mod 2) of each 2D point's
/// cell in the unit square. Points outside are clamped and flagged.
CheckerboardLabels checkerboard_labels(const std::vector<Vec>& sources, int cells_per_axis);

/// Extracts one coordinate of a point set.
std::vector<double> coordinate(const std::vector<Vec>& pts, int axis);

}  // namespace iadb
