#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iadb/eval.hpp"
#include "test_helpers.hpp"

using namespace iadb;
using namespace iadb::testing;

TEST_CASE("histogram build and centers") {
  const Histogram1d h = Histogram1d::build({0.1, 0.1, 0.9, 2.0}, 0.0, 1.0, 10);
  CHECK(h.counts[1] == 2);
  CHECK(h.counts[9] == 1);
  CHECK(h.bin_center(0) == doctest::Approx(0.05));
  CHECK_THROWS(Histogram1d::build({}, 1.0, 0.0, 4));
}

TEST_CASE("wasserstein1_1d basics") {
  CHECK(wasserstein1_1d({1.0, 2.0, 3.0}, {3.0, 1.0, 2.0}) == 0.0);
  CHECK(wasserstein1_1d({0.0, 1.0}, {0.0, 2.0}) == 0.5);
  // Translation property.
  Rng rng(6);
  std::vector<double> a(1000), b(1000);
  for (int i = 0; i < 1000; ++i) {
    a[i] = rng.normal();
    b[i] = a[i] + 0.75;
  }
  CHECK(wasserstein1_1d(a, b) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS(wasserstein1_1d({}, {}));
  CHECK_THROWS(wasserstein1_1d({1.0}, {1.0, 2.0}));
}

TEST_CASE("wasserstein1_1d is symmetric and satisfies the triangle inequality") {
  Rng rng(21);
  for (int c = 0; c < 50; ++c) {
    std::vector<double> a(200), b(200), d(200);
    for (int i = 0; i < 200; ++i) {
      a[i] = rng.normal();
      b[i] = 2.0 * rng.normal() + 1.0;
      d[i] = 0.5 * rng.normal() - 1.0;
    }
    const double ab = wasserstein1_1d(a, b);
    CHECK(wasserstein1_1d(b, a) == doctest::Approx(ab).epsilon(1e-12));
    CHECK(ab <= wasserstein1_1d(a, d) + wasserstein1_1d(d, b) + 1e-12);
  }
}

TEST_CASE("resampled W1 handles unequal sizes") {
  Rng rng(90);
  std::vector<double> a(5000), b(2000);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal();
  const double d = wasserstein1_1d_resampled(a, b, rng);
  CHECK(d < 0.1);
}

TEST_CASE("sliced wasserstein of identical, shifted and equal-law sets") {
  Rng rng(33);
  std::vector<Vec> a, b;
  for (int i = 0; i < 4000; ++i) {
    const Vec p{rng.normal(), rng.normal()};
    a.push_back(p);
    b.push_back({p[0] + 0.6, p[1] + 0.8});  // shift by a vector of norm 1
  }
  Rng proj(1);
  CHECK(sliced_wasserstein(a, a, 8, proj) == 0.0);
  // Shifted copy: per-direction W1 is |v . theta| exactly, so the average
  // approaches 2|v|/pi.
  const double sw = sliced_wasserstein(a, b, 256, proj);
  CHECK(std::abs(sw - 2.0 / std::numbers::pi) / (2.0 / std::numbers::pi) < 0.05);
  CHECK_THROWS(sliced_wasserstein({{1.0}}, {{1.0}}, 4, proj));
}

TEST_CASE("self sliced distance sits at the calibrated noise floor") {
  // Two independent draws of one distribution: the measured distance is
  // pure sampling noise. The floor (0.0158 at n = 16384, 256 projections)
  // was measured once by the calibration tool and frozen.
  const GaussianMixture g = GaussianMixture::single({0.0, 0.0}, {1.0, 1.0});
  Rng a(1234), b(4321), proj(111);
  std::vector<Vec> xs, ys;
  for (int i = 0; i < 16384; ++i) {
    xs.push_back(g.sample(a));
    ys.push_back(g.sample(b));
  }
  CHECK(sliced_wasserstein(xs, ys, 256, proj) < 1.5 * 0.0158);
}

TEST_CASE("blended reference endpoints and mid-blend variance") {
  const Density p0(normal1d(0, 1)), p1(normal1d(0, 1));
  Rng rng(17);
  const auto at0 = blended_reference(p0, p1, 0.0, 100000, rng);
  const auto direct = sample(p0, 100000, rng);
  CHECK(wasserstein1_1d(coordinate(at0, 0), coordinate(direct, 0)) < 0.02);

  const auto mid = blended_reference(p0, p1, 0.5, 100000, rng);
  double var = 0;
  for (const auto& x : mid) var += x[0] * x[0];
  var /= static_cast<double>(mid.size());
  CHECK(std::abs(var - 0.5) / 0.5 < 0.02);
}

TEST_CASE("convergence study shapes, decrease, and determinism") {
  const GaussianMixture g = normal1d(0, 1);
  std::vector<Vec> starts;
  for (int i = 0; i < 16; ++i) starts.push_back({-1.5 + 0.2 * i});

  Rng rng(505);
  const auto single = convergence_study(g, g, starts, {8}, 2, rng);
  CHECK(single.records.size() == 1);
  CHECK(single.records[0].T == 8);

  Rng rng2(505);
  const auto rep = convergence_study(g, g, starts, {8, 64, 512}, 2, rng2);
  REQUIRE(rep.records.size() == 3);
  CHECK(rep.records[0].mean_endpoint_deviation > rep.records[1].mean_endpoint_deviation);
  CHECK(rep.records[1].mean_endpoint_deviation > rep.records[2].mean_endpoint_deviation);

  Rng rng3(505);
  const auto rep2 = convergence_study(g, g, starts, {8, 64, 512}, 2, rng3);
  for (std::size_t i = 0; i < rep.records.size(); ++i)
    CHECK(rep.records[i].mean_endpoint_deviation == rep2.records[i].mean_endpoint_deviation);
}

TEST_CASE("checkerboard labels and clamping") {
  const auto r = checkerboard_labels({{0.1, 0.1}, {0.2, 0.1}, {1.5, 0.5}}, 8);
  CHECK(r.labels[0] == 0);
  CHECK(r.labels[1] == 1);
  CHECK(r.clamped[0] == 0);
  CHECK(r.clamped[2] == 1);

  // All points inside one cell share a label.
  std::vector<Vec> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.01 + 0.001 * i, 0.02});
  const auto one = checkerboard_labels(pts, 8);
  for (int l : one.labels) CHECK(l == one.labels[0]);
}
