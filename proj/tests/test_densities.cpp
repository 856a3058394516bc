#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iadb/densities.hpp"
#include "test_helpers.hpp"

using namespace iadb;
using namespace iadb::testing;

namespace {

/// Midpoint quadrature of the pdf over the density's bounding box.
double quadrature_mass(const Density& d, int grid) {
  const BoundingBox box = bounding_box(d);
  if (d.dim() == 1) {
    const double h = (box.hi[0] - box.lo[0]) / grid;
    double s = 0;
    for (int i = 0; i < grid; ++i) s += pdf(d, {box.lo[0] + (i + 0.5) * h});
    return s * h;
  }
  const double hx = (box.hi[0] - box.lo[0]) / grid;
  const double hy = (box.hi[1] - box.lo[1]) / grid;
  double s = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j)
      s += pdf(d, {box.lo[0] + (i + 0.5) * hx, box.lo[1] + (j + 0.5) * hy});
  return s * hx * hy;
}

}  // namespace

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS(GaussianMixture(1, {}));
  CHECK_THROWS(GaussianMixture(1, {{0.5, {0.0}, {1.0}}}));              // weights != 1
  CHECK_THROWS(GaussianMixture(1, {{1.0, {0.0}, {0.0}}}));              // zero stddev
  CHECK_THROWS(GaussianMixture(2, {{1.0, {0.0}, {1.0}}}));              // dim mismatch
  CHECK_THROWS(UniformRegion(Rect{{0.0, 0.0}, {1.0, 0.0}}));            // degenerate rect
  CHECK_THROWS(UniformRegion(Disk{{0.0, 0.0}, 0.0}));                   // zero radius
  CHECK_THROWS(PointCloudDensity({}, 0.1));
  CHECK_THROWS(PointCloudDensity({{0.0}}, 0.0));
}

TEST_CASE("sampling is deterministic given a seed") {
  const Density d(binormal_05());
  Rng a(11), b(11);
  const auto xs = sample(d, 100, a);
  const auto ys = sample(d, 100, b);
  CHECK(xs == ys);
}

TEST_CASE("standard normal sample mean obeys the law of large numbers") {
  Rng rng(2024);
  const Density d(normal1d(0.0, 1.0));
  const auto xs = sample(d, 100000, rng);
  double mean = 0;
  for (const auto& x : xs) mean += x[0];
  mean /= static_cast<double>(xs.size());
  CHECK(std::abs(mean) < 3.0 / std::sqrt(100000.0));
}

TEST_CASE("uniform disk samples stay in the disk") {
  Rng rng(7);
  const Density d(UniformRegion{Disk{{0.0, 0.0}, 1.0}});
  for (const auto& x : sample(d, 100000, rng)) CHECK(norm2(x) <= 1.0);
}

TEST_CASE("bi-Normal with modes +-0.5 has mean near zero") {
  Rng rng(31);
  const auto xs = sample(Density(binormal_05()), 100000, rng);
  double mean = 0;
  for (const auto& x : xs) mean += x[0];
  mean /= static_cast<double>(xs.size());
  CHECK(std::abs(mean) < 0.01);
}

TEST_CASE("pdf values match closed forms") {
  CHECK(pdf(Density(normal1d(0, 1)), {0.0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
  CHECK(pdf(Density(UniformRegion{Disk{{0.0, 0.0}, 1.0}}), {0.3, 0.1}) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
  // Equal-weight components at +-1, sigma 1, evaluated at 0.
  const double expected = std::exp(-0.5) / std::sqrt(2.0 * std::numbers::pi);
  CHECK(pdf(Density(mixture1d({-1.0, 1.0}, 1.0)), {0.0}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("pdf rejects dimension mismatches") {
  CHECK_THROWS(pdf(Density(normal1d(0, 1)), {0.0, 0.0}));
  CHECK_THROWS(pdf(Density(UniformRegion{Disk{{0.0, 0.0}, 1.0}}), {0.0}));
}

TEST_CASE("as_gaussian_mixture round trips and reports absence") {
  const GaussianMixture g = binormal_05();
  const auto back = as_gaussian_mixture(Density(g));
  REQUIRE(back.has_value());
  CHECK(back->size() == 2);
  CHECK(back->components()[0].mean[0] == -0.5);

  const PointCloudDensity pc({{0.0, 0.0}, {1.0, 1.0}, {2.0, 0.0}}, 0.2);
  const auto gm = as_gaussian_mixture(Density(pc));
  REQUIRE(gm.has_value());
  CHECK(gm->size() == 3);
  for (const auto& c : gm->components()) {
    CHECK(c.weight == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(c.stddev[0] == 0.2);
  }

  CHECK(!as_gaussian_mixture(Density(UniformRegion{Disk{{0.0, 0.0}, 1.0}})).has_value());
}

TEST_CASE("point cloud pdf equals its mixture view everywhere") {
  const PointCloudDensity pc(grid_points(-1, 1, -1, 1, 5), 0.15);
  const GaussianMixture view = pc.as_gaussian_mixture();
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const Vec x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(pc.pdf(x) == doctest::Approx(view.pdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("parametric point sets are deterministic and bounded") {
  const PointCloudDensity one = make_scurve(1, 0.0);
  REQUIRE(one.points().size() == 1);
  // t midpoint = 0 -> (sin 0, 0) = origin.
  CHECK(one.points()[0][0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(one.points()[0][1] == doctest::Approx(0.0).epsilon(1e-15));

  const PointCloudDensity roll = make_swiss_roll(1000, 0.0);
  for (const auto& p : roll.points()) {
    CHECK(std::abs(p[0]) <= 1.0);
    CHECK(std::abs(p[1]) <= 1.0);
  }

  const PointCloudDensity sc = make_scurve(1000, 0.05);
  CHECK(sc.points().size() == 1000);
  CHECK(sc.bandwidth() == 0.05);

  // Same seed, same jitter.
  const PointCloudDensity a = make_scurve(100, 0.05, 3), b = make_scurve(100, 0.05, 3);
  CHECK(a.points() == b.points());
  // Bandwidth floor guards the zero-noise case.
  CHECK(make_scurve(10, 0.0).bandwidth() == 1e-3);
}

TEST_CASE("pdf integrates to one over the bounding box") {
  CHECK(quadrature_mass(Density(normal1d(0.3, 0.7)), 512) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(quadrature_mass(Density(mixture1d({-1, 0, 1}, 0.1)), 512) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(quadrature_mass(Density(UniformRegion{Rect{{0, 0}, {2, 0.5}}}), 512) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(quadrature_mass(Density(UniformRegion{Disk{{0.5, 0.5}, 0.5}}), 512) ==
        doctest::Approx(1.0).epsilon(1e-3));
  CHECK(quadrature_mass(Density(make_scurve(100, 0.05)), 512) ==
        doctest::Approx(1.0).epsilon(1e-3));
}
