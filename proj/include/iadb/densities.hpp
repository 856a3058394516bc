#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "iadb/rng.hpp"
#include "iadb/vec.hpp"

namespace iadb {

/// One diagonal-covariance Gaussian of a mixture.
struct GaussianComponent {
  double weight = 1.0;
  Vec mean;
  Vec stddev;  // per-axis, all entries > 0
};

/// Mixture of diagonal Gaussians. Weights must sum to 1 within 1e-12 and all
/// components must share the declared dimension; the constructor enforces
/// both.
class GaussianMixture {
 public:
  GaussianMixture(int dim, std::vector<GaussianComponent> components);

  int dim() const { return dim_; }
  const std::vector<GaussianComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  double log_pdf(const Vec& x) const;
  double pdf(const Vec& x) const;
  Vec sample(Rng& rng) const;
  Vec mean() const;

  /// Single isotropic Gaussian helper.
  static GaussianMixture single(Vec mean, Vec stddev);

 private:
  int dim_;
  std::vector<GaussianComponent> components_;
};

struct Rect {
  Vec lo;
  Vec hi;  // must strictly dominate lo per axis
};

struct Disk {
  Vec center;
  double radius = 1.0;
};

/// Uniform density over an axis-aligned rectangle or a disk.
class UniformRegion {
 public:
  explicit UniformRegion(Rect r);
  explicit UniformRegion(Disk d);

  int dim() const { return dim_; }
  double pdf(const Vec& x) const;  // 1/volume inside, 0 outside
  Vec sample(Rng& rng) const;
  bool contains(const Vec& x) const;
  const std::variant<Rect, Disk>& shape() const { return shape_; }

 private:
  std::variant<Rect, Disk> shape_;
  int dim_;
  double volume_;
};

/// Equal-weight isotropic Gaussian kernel on a point set. Equivalent by
/// construction to a GaussianMixture with one component per point, each of
/// weight 1/n and stddev = bandwidth.
class PointCloudDensity {
 public:
  PointCloudDensity(std::vector<Vec> points, double bandwidth);

  int dim() const { return dim_; }
  const std::vector<Vec>& points() const { return points_; }
  double bandwidth() const { return bandwidth_; }

  double log_pdf(const Vec& x) const;
  double pdf(const Vec& x) const;
  Vec sample(Rng& rng) const;
  GaussianMixture as_gaussian_mixture() const;

 private:
  std::vector<Vec> points_;
  double bandwidth_;
  int dim_;
};

/// Tagged union over the density kinds used by the experiments.
class Density {
 public:
  Density(GaussianMixture g);       // NOLINT(google-explicit-constructor)
  Density(UniformRegion u);         // NOLINT(google-explicit-constructor)
  Density(PointCloudDensity p);     // NOLINT(google-explicit-constructor)

  int dim() const;
  const std::variant<GaussianMixture, UniformRegion, PointCloudDensity>& value() const {
    return v_;
  }

 private:
  std::variant<GaussianMixture, UniformRegion, PointCloudDensity> v_;
};

/// count i.i.d. draws; deterministic given the generator state.
std::vector<Vec> sample(const Density& density, std::size_t count, Rng& rng);

/// Exact density value. Throws on dimension mismatch.
double pdf(const Density& density, const Vec& x);
double log_pdf(const Density& density, const Vec& x);

/// The mixture itself, the point cloud's kernel mixture, or nullopt for
/// uniform regions (which have no finite mixture representation here).
std::optional<GaussianMixture> as_gaussian_mixture(const Density& density);

/// Axis-aligned box that carries all but a negligible tail of the density
/// (exact bounds for uniform regions). Used by quadrature checks and plots.
struct BoundingBox {
  Vec lo;
  Vec hi;
};
BoundingBox bounding_box(const Density& density, double tail_sigmas = 8.0);

/// Deterministic 2D S-curve point set: t stratified over [-3pi/2, 3pi/2],
/// mapped to (sin t, sign(t)(cos t - 1)) scaled per-axis into [-1,1]^2, then
/// jittered by noise * N(0, I). Bandwidth defaults to max(noise, 1e-3).
PointCloudDensity make_scurve(std::size_t count, double noise, std::uint64_t seed = 0,
                              double bandwidth = -1.0);

/// Deterministic 2D swiss roll: t stratified over [1.5pi, 4.5pi], mapped to
/// (t cos t, t sin t) / (4.5pi), then jittered by noise * N(0, I).
PointCloudDensity make_swiss_roll(std::size_t count, double noise, std::uint64_t seed = 0,
                                  double bandwidth = -1.0);

}  // namespace iadb
