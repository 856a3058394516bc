#include "iadb/eval.hpp"

#include "iadb/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "iadb/parallel.hpp"
#include "iadb/samplers.hpp"

namespace iadb {

Histogram1d Histogram1d::build(const std::vector<double>& samples, double lo, double hi,
                               int bins) {
  if (!(hi > lo)) throw std::invalid_argument("Histogram1d: hi must exceed lo");
  if (bins < 1) throw std::invalid_argument("Histogram1d: bin_count must be >= 1");
  Histogram1d h;
  h.lo = lo;
  h.hi = hi;
  h.bin_count = bins;
  h.counts.assign(bins, 0);
  const double scale = bins / (hi - lo);
  for (double s : samples) {
    if (s < lo || s >= hi) continue;
    int b = static_cast<int>((s - lo) * scale);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

double Histogram1d::bin_center(int b) const {
  return lo + (b + 0.5) * (hi - lo) / bin_count;
}

void write_histogram_csv(const Histogram1d& h, const std::filesystem::path& path) {
  CsvWriter csv(path);
  csv.header({"bin_center", "count"});
  for (int b = 0; b < h.bin_count; ++b)
    csv.row({h.bin_center(b), static_cast<double>(h.counts[b])});
}

std::vector<Vec> blended_reference(const Density& p0, const Density& p1, double alpha,
                                   std::size_t count, Rng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("blended_reference: alpha must be in [0,1]");
  const int d = p0.dim();
  if (p1.dim() != d) throw std::invalid_argument("blended_reference: density dimension mismatch");
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec x0 = sample(p0, 1, rng).front();
    Vec x1 = sample(p1, 1, rng).front();
    Vec x(d);
    for (int k = 0; k < d; ++k) x[k] = (1.0 - alpha) * x0[k] + alpha * x1[k];
    out.push_back(std::move(x));
  }
  return out;
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1_1d: empty input");
  if (a.size() != b.size())
    throw std::invalid_argument("wasserstein1_1d: sample sets must have equal size");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

double wasserstein1_1d_resampled(std::vector<double> a, std::vector<double> b, Rng& rng) {
  auto shrink = [&](std::vector<double>& v, std::size_t m) {
    // Partial Fisher-Yates keeps a uniform subset without replacement.
    for (std::size_t i = 0; i < m; ++i)
      std::swap(v[i], v[i + rng.uniform_index(v.size() - i)]);
    v.resize(m);
  };
  if (a.size() > b.size())
    shrink(a, b.size());
  else if (b.size() > a.size())
    shrink(b, a.size());
  return wasserstein1_1d(std::move(a), std::move(b));
}

double sliced_wasserstein(const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
                          Rng& rng) {
  if (projections < 1) throw std::invalid_argument("sliced_wasserstein: projections must be >= 1");
  if (a.empty() || b.empty()) throw std::invalid_argument("sliced_wasserstein: empty input");
  if (a.front().size() != 2 || b.front().size() != 2)
    throw std::invalid_argument("sliced_wasserstein: 2D samples only");
  if (a.size() != b.size())
    throw std::invalid_argument("sliced_wasserstein: sample sets must have equal size");

  // Directions come from the caller's stream (serially); the per-direction
  // distances are independent jobs combined in direction order.
  std::vector<double> angle(projections);
  for (int p = 0; p < projections; ++p) angle[p] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<double> w1(projections);
  parallel_for(projections, [&](std::size_t p) {
    const double cx = std::cos(angle[p]), cy = std::sin(angle[p]);
    std::vector<double> pa(a.size()), pb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = cx * a[i][0] + cy * a[i][1];
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = cx * b[i][0] + cy * b[i][1];
    w1[p] = wasserstein1_1d(std::move(pa), std::move(pb));
  });
  double s = 0;
  for (double v : w1) s += v;
  return s / projections;
}

ConvergenceReport convergence_study(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                    const std::vector<Vec>& starts, const std::vector<int>& Ts,
                                    int chains_per_start, Rng& rng) {
  if (Ts.empty()) throw std::invalid_argument("convergence_study: Ts must be nonempty");
  if (starts.empty()) throw std::invalid_argument("convergence_study: starts must be nonempty");
  if (chains_per_start < 1)
    throw std::invalid_argument("convergence_study: chains_per_start must be >= 1");
  for (std::size_t i = 1; i < Ts.size(); ++i)
    if (Ts[i] <= Ts[i - 1])
      throw std::invalid_argument("convergence_study: Ts must strictly increase");

  const AnalyticGmmDeblender deblender(gmm0, gmm1);
  const std::uint64_t root = rng.seed();
  ConvergenceReport report;
  for (std::size_t ti = 0; ti < Ts.size(); ++ti) {
    const int T = Ts[ti];
    const Schedule schedule = Schedule::uniform(T);
    std::vector<double> per_start(starts.size());
    parallel_for(starts.size(), [&](std::size_t s) {
      const Vec det_end =
          sample_deterministic(deblender, starts[s], schedule, VariantKind::D, Integrator::euler)
              .endpoint();
      double acc = 0;
      for (int c = 0; c < chains_per_start; ++c) {
        Rng chain_rng(derive_seed(root, "convergence-chain",
                                  (ti * starts.size() + s) * chains_per_start + c));
        const Vec sto_end =
            sample_stochastic(gmm0, gmm1, starts[s], schedule, chain_rng).endpoint();
        acc += dist2(sto_end, det_end);
      }
      per_start[s] = acc / chains_per_start;
    });
    double mean = 0;
    for (double v : per_start) mean += v;
    mean /= static_cast<double>(per_start.size());
    report.records.push_back({T, mean});
  }
  return report;
}

CheckerboardLabels checkerboard_labels(const std::vector<Vec>& sources, int cells_per_axis) {
  if (cells_per_axis < 1)
    throw std::invalid_argument("checkerboard_labels: cells_per_axis must be >= 1");
  CheckerboardLabels out;
  out.labels.resize(sources.size());
  out.clamped.assign(sources.size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    check_dim(sources[i], 2, "checkerboard_labels");
    double u = sources[i][0], v = sources[i][1];
    if (u < 0 || u > 1 || v < 0 || v > 1) {
      out.clamped[i] = 1;
      u = std::clamp(u, 0.0, 1.0);
      v = std::clamp(v, 0.0, 1.0);
    }
    const int cu = std::min(cells_per_axis - 1, static_cast<int>(u * cells_per_axis));
    const int cv = std::min(cells_per_axis - 1, static_cast<int>(v * cells_per_axis));
    out.labels[i] = (cu + cv) % 2;
  }
  return out;
}

std::vector<double> coordinate(const std::vector<Vec>& pts, int axis) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i][axis];
  return out;
}

}  // namespace iadb
