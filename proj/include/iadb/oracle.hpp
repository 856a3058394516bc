#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "iadb/densities.hpp"
#include "iadb/rng.hpp"
#include "iadb/vec.hpp"

namespace iadb {

/// A blended point together with its blend parameter.
struct BlendState {
  Vec x;
  double alpha = 0.0;
};

/// Posterior expectations of a blended point: the pair (xbar0, xbar1) and
/// their difference. diff is always stored as the componentwise subtraction
/// xbar1 - xbar0.
struct DeblendStats {
  Vec xbar0;
  Vec xbar1;
  Vec diff;

  static DeblendStats from_means(Vec xbar0, Vec xbar1);

  /// Builds full stats from a predicted difference vector using the
  /// consistency identity: xbar0 = x - alpha*d, xbar1 = x + (1-alpha)*d.
  static DeblendStats from_diff(const Vec& x, double alpha, const Vec& d);
};

/// Abstract deblending contract: (x, alpha) -> posterior expectations.
class Deblender {
 public:
  virtual ~Deblender() = default;
  virtual DeblendStats stats(const Vec& x, double alpha) const = 0;
  virtual int dim() const = 0;
};

/// Options for the analytic oracle on large mixtures.
struct AnalyticOracleOptions {
  /// Never subsample component pairs, whatever the cost.
  bool exact = false;
  /// Above this many pairs, both mixtures are uniformly subsampled.
  std::size_t pair_budget = 1000000;
  /// Seed of the subsampling stream.
  std::uint64_t subsample_seed = 0;
  /// Pairs this many nats below the best are dropped from the sums.
  double prune_nats = 40.0;
};

/// Exact posterior expectations under (p0 x p1)|(x, alpha) for a pair of
/// diagonal-covariance Gaussian mixtures. Pair responsibilities are combined
/// in log space.
DeblendStats analytic_posterior_stats(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                      const Vec& x, double alpha,
                                      const AnalyticOracleOptions& opts = {});

/// Self-normalized importance estimate of the posterior expectations.
/// Returns nullopt if every proposal receives zero weight (the query point is
/// outside the reachable support). Requires alpha in (0,1).
std::optional<DeblendStats> mc_posterior_stats(const Density& p0, const Density& p1, const Vec& x,
                                               double alpha, std::size_t n, Rng& rng);

/// Exact draw of a posterior pair (x0, x1) with (1-alpha)x0 + alpha*x1 = x.
std::pair<Vec, Vec> posterior_sample(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                     const Vec& x, double alpha, Rng& rng);

/// Posterior median of the scalar difference x1 - x0 given (x, alpha), for
/// 1D mixtures. Computed by bisection on the posterior mixture CDF.
double posterior_diff_median(const GaussianMixture& gmm0, const GaussianMixture& gmm1, double x,
                             double alpha);

/// Deblender realizations ------------------------------------------------

class AnalyticGmmDeblender final : public Deblender {
 public:
  AnalyticGmmDeblender(GaussianMixture gmm0, GaussianMixture gmm1,
                       AnalyticOracleOptions opts = {});

  DeblendStats stats(const Vec& x, double alpha) const override;
  int dim() const override { return gmm0_.dim(); }

  const GaussianMixture& gmm0() const { return gmm0_; }
  const GaussianMixture& gmm1() const { return gmm1_; }
  /// True when the pair budget forced component subsampling.
  bool subsampled() const { return subsampled_; }

 private:
  GaussianMixture gmm0_;
  GaussianMixture gmm1_;
  AnalyticOracleOptions opts_;
  bool subsampled_ = false;
};

/// Median-of-difference deblender for 1D densities (used by the l1/median
/// comparison experiments). Produces stats via the consistency identity.
class MedianDeblender1d final : public Deblender {
 public:
  MedianDeblender1d(GaussianMixture gmm0, GaussianMixture gmm1);

  DeblendStats stats(const Vec& x, double alpha) const override;
  int dim() const override { return 1; }

 private:
  GaussianMixture gmm0_;
  GaussianMixture gmm1_;
};

/// Monte-Carlo deblender. Draws come from a caller-owned generator, so the
/// instance is not pure and not safe for concurrent use; parallel callers
/// must construct one per stream.
class MonteCarloDeblender final : public Deblender {
 public:
  MonteCarloDeblender(Density p0, Density p1, std::size_t samples, Rng rng);

  /// Throws std::runtime_error on estimation failure.
  DeblendStats stats(const Vec& x, double alpha) const override;
  int dim() const override { return p0_.dim(); }

 private:
  Density p0_;
  Density p1_;
  std::size_t samples_;
  mutable Rng rng_;
};

}  // namespace iadb
