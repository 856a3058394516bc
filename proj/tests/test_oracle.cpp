#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "iadb/eval.hpp"
#include "iadb/oracle.hpp"
#include "quadrature_oracle.hpp"
#include "test_helpers.hpp"

using namespace iadb;
using namespace iadb::testing;

TEST_CASE("stats store diff as the exact componentwise subtraction") {
  const auto s = DeblendStats::from_means({1.0, 2.0}, {4.0, 6.0});
  CHECK(s.diff[0] == 3.0);
  CHECK(s.diff[1] == 4.0);
  const auto t = DeblendStats::from_diff({1.0}, 0.25, {2.0});
  CHECK(t.xbar0[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.xbar1[0] == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(t.diff[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("identical priors give zero difference by symmetry") {
  const GaussianMixture g = normal1d(0, 1);
  for (double x : {-2.0, -0.3, 0.0, 1.7}) {
    const auto s = analytic_posterior_stats(g, g, {x}, 0.5);
    CHECK(std::abs(s.diff[0]) < 1e-12);
  }
}

TEST_CASE("alpha = 0 pins xbar0 at the query and xbar1 at the prior mean") {
  const auto s = analytic_posterior_stats(normal1d(0, 1), normal1d(2, 1), {0.3}, 0.0);
  CHECK(s.xbar0[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.xbar1[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.diff[0] == doctest::Approx(1.7).epsilon(1e-12));
}

TEST_CASE("equal variances at alpha = 1/2 make the difference constant") {
  // With equal component variances the x-coefficients cancel at alpha = 1/2,
  // so diff = mean(p1) - mean(p0) = 2 for any query point. Cross-checked
  // against the brute-force quadrature oracle.
  const GaussianMixture p0 = normal1d(0, 1), p1 = normal1d(2, 1);
  const Density d0(p0), d1(p1);
  for (double x : {-1.0, 0.0, 1.0, 2.5}) {
    const auto s = analytic_posterior_stats(p0, p1, {x}, 0.5);
    CHECK(s.diff[0] == doctest::Approx(2.0).epsilon(1e-9));
    const auto q = quad_posterior_stats_1d(d0, d1, x, 0.5, 1 << 20);
    CHECK(std::abs(s.xbar0[0] - q.xbar0) < 1e-6);
    CHECK(std::abs(s.xbar1[0] - q.xbar1) < 1e-6);
  }
}

TEST_CASE("analytic stats match the quadrature oracle on random mixtures") {
  Rng rng(404);
  for (int c = 0; c < 6; ++c) {
    const GaussianMixture p0 = random_mixture(1, rng);
    const GaussianMixture p1 = random_mixture(1, rng);
    const double alpha = rng.uniform(0.1, 0.9);
    const double x = rng.uniform(-2.0, 2.0);
    const auto s = analytic_posterior_stats(p0, p1, {x}, alpha);
    const auto q = quad_posterior_stats_1d(Density(p0), Density(p1), x, alpha, 1 << 21);
    CHECK(std::abs(s.xbar0[0] - q.xbar0) < 1e-4);
    CHECK(std::abs(s.xbar1[0] - q.xbar1) < 1e-4);
  }
}

TEST_CASE("consistency and recovery identities hold on random queries") {
  Rng rng(808);
  for (int c = 0; c < 1000; ++c) {
    const int dim = 1 + static_cast<int>(rng.uniform_index(2));
    const GaussianMixture p0 = random_mixture(dim, rng);
    const GaussianMixture p1 = random_mixture(dim, rng);
    const double alpha = rng.uniform();
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = rng.uniform(-4.0, 4.0);
    const auto s = analytic_posterior_stats(p0, p1, x, alpha);
    for (int k = 0; k < dim; ++k) {
      CHECK(std::abs((1.0 - alpha) * s.xbar0[k] + alpha * s.xbar1[k] - x[k]) < 1e-9);
      // Recovery from the stored difference alone.
      CHECK(std::abs((x[k] - alpha * s.diff[k]) - s.xbar0[k]) < 1e-12);
      CHECK(std::abs((x[k] + (1.0 - alpha) * s.diff[k]) - s.xbar1[k]) < 1e-12);
    }
  }
}

TEST_CASE("alpha outside [0,1] is rejected") {
  const GaussianMixture g = normal1d(0, 1);
  CHECK_THROWS(analytic_posterior_stats(g, g, {0.0}, -0.1));
  CHECK_THROWS(analytic_posterior_stats(g, g, {0.0}, 1.1));
}

TEST_CASE("pair budget subsampling keeps the deblender usable") {
  Rng rng(5);
  std::vector<Vec> pts0, pts1;
  for (int i = 0; i < 60; ++i) pts0.push_back({rng.uniform(-1, 1)});
  for (int i = 0; i < 60; ++i) pts1.push_back({rng.uniform(1, 3)});
  const GaussianMixture g0 = PointCloudDensity(pts0, 0.1).as_gaussian_mixture();
  const GaussianMixture g1 = PointCloudDensity(pts1, 0.1).as_gaussian_mixture();
  AnalyticOracleOptions opts;
  opts.pair_budget = 400;  // force 60*60 -> <= 400 pairs
  const AnalyticGmmDeblender capped(g0, g1, opts);
  CHECK(capped.subsampled());
  CHECK(capped.gmm0().size() * capped.gmm1().size() <= 400);
  const auto s = capped.stats({1.0}, 0.5);
  CHECK(std::abs(0.5 * s.xbar0[0] + 0.5 * s.xbar1[0] - 1.0) < 1e-9);

  opts.exact = true;
  const AnalyticGmmDeblender exact(g0, g1, opts);
  CHECK(!exact.subsampled());
  CHECK(exact.gmm0().size() == 60);
}

TEST_CASE("monte carlo estimate agrees with symmetry and the analytic oracle") {
  Rng rng(99);
  const Density u01(UniformRegion{Rect{{0.0}, {1.0}}});
  const auto sym = mc_posterior_stats(u01, u01, {0.5}, 0.5, 100000, rng);
  REQUIRE(sym.has_value());
  CHECK(std::abs(sym->diff[0]) < 0.02);

  const GaussianMixture p0 = normal1d(0, 1), p1 = normal1d(2, 1);
  const auto mc = mc_posterior_stats(Density(p0), Density(p1), {1.0}, 0.5, 100000, rng);
  REQUIRE(mc.has_value());
  CHECK(std::abs(mc->diff[0] - 2.0) < 0.05);
}

TEST_CASE("monte carlo error shrinks with the sample count") {
  const GaussianMixture p0 = binormal_05(), p1 = normal1d(0, 1);
  const auto exact = analytic_posterior_stats(p0, p1, {0.25}, 0.4);
  double prev = 1e9;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    Rng rng(derive_seed(3030, "mc-n", n));
    const auto mc = mc_posterior_stats(Density(p0), Density(p1), {0.25}, 0.4, n, rng);
    REQUIRE(mc.has_value());
    const double err = std::abs(mc->diff[0] - exact.diff[0]);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("monte carlo failure outside the reachable support") {
  Rng rng(12);
  const Density p0(UniformRegion{Rect{{0.0}, {1.0}}});
  const Density p1(UniformRegion{Rect{{2.0}, {3.0}}});
  CHECK(!mc_posterior_stats(p0, p1, {10.0}, 0.5, 1000, rng).has_value());
  CHECK_THROWS(mc_posterior_stats(p0, p1, {0.5}, 0.0, 10, rng));
  CHECK_THROWS(mc_posterior_stats(p0, p1, {0.5}, 1.0, 10, rng));
}

TEST_CASE("posterior_sample endpoints and blend identity") {
  const GaussianMixture p0 = normal1d(0, 1), p1 = normal1d(2, 1);
  Rng rng(55);
  auto [a0, a1] = posterior_sample(p0, p1, {0.7}, 0.0, rng);
  CHECK(a0[0] == 0.7);
  auto [b0, b1] = posterior_sample(p0, p1, {0.7}, 1.0, rng);
  CHECK(b1[0] == 0.7);
  for (int i = 0; i < 500; ++i) {
    const double alpha = rng.uniform(0.01, 0.99);
    const double x = rng.uniform(-1.0, 3.0);
    auto [x0, x1] = posterior_sample(p0, p1, {x}, alpha, rng);
    CHECK(std::abs((1.0 - alpha) * x0[0] + alpha * x1[0] - x) < 1e-9);
  }
}

TEST_CASE("posterior_sample marginals reproduce the priors") {
  // Law of total probability: deblending a random blended sample returns
  // prior-distributed posteriors.
  const GaussianMixture p0 = normal1d(0, 1), p1 = normal1d(2, 1);
  Rng rng(77);
  const std::size_t n = 30000;
  std::vector<double> x0s, x1s, ref0, ref1;
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = p0.sample(rng)[0], a1 = p1.sample(rng)[0];
    const double x = 0.5 * a0 + 0.5 * a1;
    auto [b0, b1] = posterior_sample(p0, p1, {x}, 0.5, rng);
    x0s.push_back(b0[0]);
    x1s.push_back(b1[0]);
    ref0.push_back(p0.sample(rng)[0]);
    ref1.push_back(p1.sample(rng)[0]);
  }
  CHECK(wasserstein1_1d(x0s, ref0) < 0.02);
  CHECK(wasserstein1_1d(x1s, ref1) < 0.02);
}

TEST_CASE("posterior difference median matches the quadrature quantile oracle") {
  const GaussianMixture p0 = normal1d(0, 1);
  const GaussianMixture p1(1, {{0.8, {0.0}, {0.3}}, {0.2, {2.0}, {0.3}}});
  const Density d0(p0), d1(p1);
  for (double alpha : {0.2, 0.5, 0.8}) {
    for (double x : {-0.5, 0.3, 1.0}) {
      const double med = posterior_diff_median(p0, p1, x, alpha);
      const double ref = quad_posterior_diff_quantile_1d(d0, d1, x, alpha, 0.5, 1 << 21);
      CHECK(std::abs(med - ref) < 1e-4);
    }
  }
  // Symmetric posteriors: median equals mean.
  const auto s = analytic_posterior_stats(p0, p0, {0.4}, 0.3);
  CHECK(posterior_diff_median(p0, p0, 0.4, 0.3) == doctest::Approx(s.diff[0]).epsilon(1e-6));
}

TEST_CASE("deblender realizations expose the contract") {
  const AnalyticGmmDeblender an(binormal_05(), normal1d(0, 1));
  const auto s = an.stats({0.2}, 0.3);
  CHECK(std::abs(0.7 * s.xbar0[0] + 0.3 * s.xbar1[0] - 0.2) < 1e-9);
  CHECK(an.dim() == 1);
  CHECK(!an.subsampled());

  const MedianDeblender1d med(binormal_05(), normal1d(0, 1));
  const auto m = med.stats({0.2}, 0.3);
  CHECK(std::abs(0.7 * m.xbar0[0] + 0.3 * m.xbar1[0] - 0.2) < 1e-9);

  MonteCarloDeblender mc(Density(binormal_05()), Density(normal1d(0, 1)), 20000, Rng(4));
  const auto e = mc.stats({0.2}, 0.3);
  CHECK(std::abs(e.diff[0] - s.diff[0]) < 0.1);
}
