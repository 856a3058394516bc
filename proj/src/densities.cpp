#include "iadb/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iadb {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

double log_normal_pdf(double x, double mean, double stddev) {
  const double z = (x - mean) / stddev;
  return -0.5 * z * z - std::log(stddev) - 0.5 * kLogTwoPi;
}

double log_sum_exp(const std::vector<double>& logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianMixture

GaussianMixture::GaussianMixture(int dim, std::vector<GaussianComponent> components)
    : dim_(dim), components_(std::move(components)) {
  if (dim_ < 1) throw std::invalid_argument("GaussianMixture: dimension must be >= 1");
  if (components_.empty()) throw std::invalid_argument("GaussianMixture: needs >= 1 component");
  KahanSum wsum;
  for (const auto& c : components_) {
    if (c.mean.size() != static_cast<std::size_t>(dim_) ||
        c.stddev.size() != static_cast<std::size_t>(dim_))
      throw std::invalid_argument("GaussianMixture: component dimension mismatch");
    if (!(c.weight > 0)) throw std::invalid_argument("GaussianMixture: weight must be > 0");
    if (!all_finite(c.mean)) throw std::invalid_argument("GaussianMixture: non-finite mean");
    for (double s : c.stddev)
      if (!(s > 0) || !std::isfinite(s))
        throw std::invalid_argument("GaussianMixture: stddev must be finite and > 0");
    wsum.add(c.weight);
  }
  if (std::abs(wsum.value() - 1.0) > 1e-12)
    throw std::invalid_argument("GaussianMixture: weights must sum to 1 within 1e-12");
}

double GaussianMixture::log_pdf(const Vec& x) const {
  check_dim(x, static_cast<std::size_t>(dim_), "GaussianMixture::log_pdf");
  std::vector<double> logs(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    double lp = std::log(c.weight);
    for (int k = 0; k < dim_; ++k) lp += log_normal_pdf(x[k], c.mean[k], c.stddev[k]);
    logs[i] = lp;
  }
  return log_sum_exp(logs);
}

double GaussianMixture::pdf(const Vec& x) const { return std::exp(log_pdf(x)); }

Vec GaussianMixture::sample(Rng& rng) const {
  // Component by cumulative weight, then per-axis normal draw.
  std::size_t idx = components_.size() - 1;
  const double u = rng.uniform();
  double acc = 0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    acc += components_[i].weight;
    if (u < acc) {
      idx = i;
      break;
    }
  }
  const auto& c = components_[idx];
  Vec x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = c.mean[k] + c.stddev[k] * rng.normal();
  return x;
}

Vec GaussianMixture::mean() const {
  Vec m(dim_, 0.0);
  for (const auto& c : components_)
    for (int k = 0; k < dim_; ++k) m[k] += c.weight * c.mean[k];
  return m;
}

GaussianMixture GaussianMixture::single(Vec mean, Vec stddev) {
  const int d = static_cast<int>(mean.size());
  return GaussianMixture(d, {GaussianComponent{1.0, std::move(mean), std::move(stddev)}});
}

// ---------------------------------------------------------------------------
// UniformRegion

UniformRegion::UniformRegion(Rect r) : shape_(std::move(r)) {
  const Rect& rect = std::get<Rect>(shape_);
  if (rect.lo.empty() || rect.lo.size() != rect.hi.size())
    throw std::invalid_argument("UniformRegion: rectangle corners must share a dimension");
  dim_ = static_cast<int>(rect.lo.size());
  volume_ = 1.0;
  for (int k = 0; k < dim_; ++k) {
    if (!(rect.hi[k] > rect.lo[k]))
      throw std::invalid_argument("UniformRegion: max corner must strictly dominate min corner");
    volume_ *= rect.hi[k] - rect.lo[k];
  }
}

UniformRegion::UniformRegion(Disk d) : shape_(std::move(d)) {
  const Disk& disk = std::get<Disk>(shape_);
  if (disk.center.empty()) throw std::invalid_argument("UniformRegion: disk needs a center");
  if (!(disk.radius > 0)) throw std::invalid_argument("UniformRegion: disk radius must be > 0");
  dim_ = static_cast<int>(disk.center.size());
  // Volume of the d-ball.
  volume_ = std::pow(std::numbers::pi, dim_ / 2.0) / std::tgamma(dim_ / 2.0 + 1.0) *
            std::pow(disk.radius, dim_);
}

bool UniformRegion::contains(const Vec& x) const {
  check_dim(x, static_cast<std::size_t>(dim_), "UniformRegion::contains");
  if (const Rect* r = std::get_if<Rect>(&shape_)) {
    for (int k = 0; k < dim_; ++k)
      if (x[k] < r->lo[k] || x[k] > r->hi[k]) return false;
    return true;
  }
  const Disk& d = std::get<Disk>(shape_);
  return dist2(x, d.center) <= d.radius;
}

double UniformRegion::pdf(const Vec& x) const { return contains(x) ? 1.0 / volume_ : 0.0; }

Vec UniformRegion::sample(Rng& rng) const {
  if (const Rect* r = std::get_if<Rect>(&shape_)) {
    Vec x(dim_);
    for (int k = 0; k < dim_; ++k) x[k] = rng.uniform(r->lo[k], r->hi[k]);
    return x;
  }
  // Disk: isotropic direction, radius by inverse CDF (r^d law).
  const Disk& d = std::get<Disk>(shape_);
  Vec dir(dim_);
  double n = 0;
  do {
    for (int k = 0; k < dim_; ++k) dir[k] = rng.normal();
    n = norm2(dir);
  } while (n == 0);
  const double r = d.radius * std::pow(rng.uniform(), 1.0 / dim_);
  Vec x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = d.center[k] + r * dir[k] / n;
  return x;
}

// ---------------------------------------------------------------------------
// PointCloudDensity

PointCloudDensity::PointCloudDensity(std::vector<Vec> points, double bandwidth)
    : points_(std::move(points)), bandwidth_(bandwidth) {
  if (points_.empty()) throw std::invalid_argument("PointCloudDensity: needs >= 1 point");
  if (!(bandwidth_ > 0)) throw std::invalid_argument("PointCloudDensity: bandwidth must be > 0");
  dim_ = static_cast<int>(points_.front().size());
  for (const auto& p : points_) {
    if (p.size() != static_cast<std::size_t>(dim_))
      throw std::invalid_argument("PointCloudDensity: inconsistent point dimensions");
    if (!all_finite(p)) throw std::invalid_argument("PointCloudDensity: non-finite point");
  }
}

double PointCloudDensity::log_pdf(const Vec& x) const {
  check_dim(x, static_cast<std::size_t>(dim_), "PointCloudDensity::log_pdf");
  std::vector<double> logs(points_.size());
  const double lw = std::log(1.0 / static_cast<double>(points_.size()));
  for (std::size_t i = 0; i < points_.size(); ++i) {
    double lp = lw;
    for (int k = 0; k < dim_; ++k) lp += log_normal_pdf(x[k], points_[i][k], bandwidth_);
    logs[i] = lp;
  }
  return log_sum_exp(logs);
}

double PointCloudDensity::pdf(const Vec& x) const { return std::exp(log_pdf(x)); }

Vec PointCloudDensity::sample(Rng& rng) const {
  const Vec& p = points_[rng.uniform_index(points_.size())];
  Vec x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = p[k] + bandwidth_ * rng.normal();
  return x;
}

GaussianMixture PointCloudDensity::as_gaussian_mixture() const {
  std::vector<GaussianComponent> comps;
  comps.reserve(points_.size());
  const double w = 1.0 / static_cast<double>(points_.size());
  for (const auto& p : points_)
    comps.push_back(GaussianComponent{w, p, Vec(dim_, bandwidth_)});
  return GaussianMixture(dim_, std::move(comps));
}

// ---------------------------------------------------------------------------
// Density

Density::Density(GaussianMixture g) : v_(std::move(g)) {}
Density::Density(UniformRegion u) : v_(std::move(u)) {}
Density::Density(PointCloudDensity p) : v_(std::move(p)) {}

int Density::dim() const {
  return std::visit([](const auto& d) { return d.dim(); }, v_);
}

std::vector<Vec> sample(const Density& density, std::size_t count, Rng& rng) {
  if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
  std::vector<Vec> out;
  out.reserve(count);
  std::visit(
      [&](const auto& d) {
        for (std::size_t i = 0; i < count; ++i) out.push_back(d.sample(rng));
      },
      density.value());
  return out;
}

double pdf(const Density& density, const Vec& x) {
  return std::visit([&](const auto& d) { return d.pdf(x); }, density.value());
}

double log_pdf(const Density& density, const Vec& x) {
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformRegion>)
          return std::log(d.pdf(x));
        else
          return d.log_pdf(x);
      },
      density.value());
}

std::optional<GaussianMixture> as_gaussian_mixture(const Density& density) {
  return std::visit(
      [](const auto& d) -> std::optional<GaussianMixture> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, GaussianMixture>)
          return d;
        else if constexpr (std::is_same_v<T, PointCloudDensity>)
          return d.as_gaussian_mixture();
        else
          return std::nullopt;
      },
      density.value());
}

BoundingBox bounding_box(const Density& density, double tail_sigmas) {
  const int d = density.dim();
  BoundingBox box{Vec(d, std::numeric_limits<double>::infinity()),
                  Vec(d, -std::numeric_limits<double>::infinity())};
  auto extend = [&](const Vec& lo, const Vec& hi) {
    for (int k = 0; k < d; ++k) {
      box.lo[k] = std::min(box.lo[k], lo[k]);
      box.hi[k] = std::max(box.hi[k], hi[k]);
    }
  };
  std::visit(
      [&](const auto& den) {
        using T = std::decay_t<decltype(den)>;
        if constexpr (std::is_same_v<T, GaussianMixture>) {
          for (const auto& c : den.components()) {
            Vec lo(d), hi(d);
            for (int k = 0; k < d; ++k) {
              lo[k] = c.mean[k] - tail_sigmas * c.stddev[k];
              hi[k] = c.mean[k] + tail_sigmas * c.stddev[k];
            }
            extend(lo, hi);
          }
        } else if constexpr (std::is_same_v<T, PointCloudDensity>) {
          for (const auto& p : den.points()) {
            Vec lo(d), hi(d);
            for (int k = 0; k < d; ++k) {
              lo[k] = p[k] - tail_sigmas * den.bandwidth();
              hi[k] = p[k] + tail_sigmas * den.bandwidth();
            }
            extend(lo, hi);
          }
        } else {
          if (const Rect* r = std::get_if<Rect>(&den.shape())) {
            extend(r->lo, r->hi);
          } else {
            const Disk& disk = std::get<Disk>(den.shape());
            Vec lo(d), hi(d);
            for (int k = 0; k < d; ++k) {
              lo[k] = disk.center[k] - disk.radius;
              hi[k] = disk.center[k] + disk.radius;
            }
            extend(lo, hi);
          }
        }
      },
      density.value());
  return box;
}

// ---------------------------------------------------------------------------
// Parametric point sets

namespace {

double default_bandwidth(double noise, double bandwidth) {
  if (bandwidth > 0) return bandwidth;
  return std::max(noise, 1e-3);
}

std::vector<Vec> jitter(std::vector<Vec> pts, double noise, std::uint64_t seed,
                        std::string_view label) {
  if (noise > 0) {
    Rng rng(derive_seed(seed, label));
    for (auto& p : pts)
      for (auto& c : p) c += noise * rng.normal();
  }
  return pts;
}

}  // namespace

PointCloudDensity make_scurve(std::size_t count, double noise, std::uint64_t seed,
                              double bandwidth) {
  if (count < 1) throw std::invalid_argument("make_scurve: count must be >= 1");
  if (noise < 0) throw std::invalid_argument("make_scurve: noise must be >= 0");
  const double lo = -1.5 * std::numbers::pi, hi = 1.5 * std::numbers::pi;
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(count);
    const double sgn = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
    // y spans [-2, 2] before scaling; divide by 2 to land in the unit box.
    pts.push_back({std::sin(t), sgn * (std::cos(t) - 1.0) / 2.0});
  }
  return PointCloudDensity(jitter(std::move(pts), noise, seed, "scurve-jitter"),
                           default_bandwidth(noise, bandwidth));
}

PointCloudDensity make_swiss_roll(std::size_t count, double noise, std::uint64_t seed,
                                  double bandwidth) {
  if (count < 1) throw std::invalid_argument("make_swiss_roll: count must be >= 1");
  if (noise < 0) throw std::invalid_argument("make_swiss_roll: noise must be >= 0");
  const double lo = 1.5 * std::numbers::pi, hi = 4.5 * std::numbers::pi;
  std::vector<Vec> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(count);
    pts.push_back({t * std::cos(t) / hi, t * std::sin(t) / hi});
  }
  return PointCloudDensity(jitter(std::move(pts), noise, seed, "swissroll-jitter"),
                           default_bandwidth(noise, bandwidth));
}

}  // namespace iadb
