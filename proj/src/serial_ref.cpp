#include "iadb/serial_ref.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iadb::ref {

namespace {

double act_value(Activation a, double z) {
  if (a == Activation::relu) return z > 0 ? z : 0.0;
  return 0.5 * z * (1.0 + std::erf(z / std::numbers::sqrt2));
}

double act_deriv(Activation a, double z) {
  if (a == Activation::relu) return z > 0 ? 1.0 : 0.0;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)) + z * phi;
}

}  // namespace

double loss_and_grads(const Mlp& net, std::span<const TrainSample> batch, LossKind kind,
                      Gradients& grads) {
  const int L = net.layer_count();
  const int d = net.output_dim();
  grads = Gradients::zeros_like(net);
  double loss = 0;
  std::vector<Vec> a(L + 1), z(L);
  for (const TrainSample& s : batch) {
    a[0].resize(s.x0.size() + 1);
    for (std::size_t k = 0; k < s.x0.size(); ++k)
      a[0][k] = (1.0 - s.alpha) * s.x0[k] + s.alpha * s.x1[k];
    a[0][s.x0.size()] = s.alpha;
    for (int l = 0; l < L; ++l) {
      const int nin = net.layer_sizes[l], nout = net.layer_sizes[l + 1];
      z[l].assign(nout, 0.0);
      a[l + 1].assign(nout, 0.0);
      for (int r = 0; r < nout; ++r) {
        double acc = net.biases[l][r];
        for (int c = 0; c < nin; ++c) acc += net.weights[l][r * nin + c] * a[l][c];
        z[l][r] = acc;
        a[l + 1][r] = (l == L - 1) ? acc : act_value(net.activation, acc);
      }
    }
    Vec delta(d);
    for (int k = 0; k < d; ++k) {
      const double r = a[L][k] - (s.x1[k] - s.x0[k]);
      if (kind == LossKind::l2) {
        loss += r * r;
        delta[k] = 2.0 * r;
      } else {
        loss += std::abs(r);
        delta[k] = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
      }
    }
    for (int l = L - 1; l >= 0; --l) {
      const int nin = net.layer_sizes[l], nout = net.layer_sizes[l + 1];
      if (l != L - 1)
        for (int r = 0; r < nout; ++r) delta[r] *= act_deriv(net.activation, z[l][r]);
      for (int r = 0; r < nout; ++r) {
        grads.biases[l][r] += delta[r];
        for (int c = 0; c < nin; ++c) grads.weights[l][r * nin + c] += delta[r] * a[l][c];
      }
      if (l > 0) {
        Vec prev(nin, 0.0);
        for (int r = 0; r < nout; ++r)
          for (int c = 0; c < nin; ++c) prev[c] += delta[r] * net.weights[l][r * nin + c];
        delta = std::move(prev);
      }
    }
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  grads.scale_by(inv);
  return loss * inv;
}

std::optional<DeblendStats> mc_posterior_stats(const Density& p0, const Density& p1, const Vec& x,
                                               double alpha, std::size_t n, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ref::mc_posterior_stats: alpha must be in (0,1)");
  const int d = p0.dim();
  const bool propose_x1 = alpha <= 0.5;
  const std::vector<Vec> draws = sample(propose_x1 ? p1 : p0, n, rng);
  std::vector<double> logw(n);
  std::vector<Vec> partners(n);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Vec partner(d);
    for (int k = 0; k < d; ++k)
      partner[k] = propose_x1 ? (x[k] - alpha * draws[i][k]) / (1.0 - alpha)
                              : (x[k] - (1.0 - alpha) * draws[i][k]) / alpha;
    logw[i] = log_pdf(propose_x1 ? p0 : p1, partner);
    max_lw = std::max(max_lw, logw[i]);
    partners[i] = std::move(partner);
  }
  if (!std::isfinite(max_lw)) return std::nullopt;
  double wsum = 0;
  Vec s0(d, 0.0), s1(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(logw[i] - max_lw);
    wsum += w;
    const Vec& x1 = propose_x1 ? draws[i] : partners[i];
    const Vec& x0 = propose_x1 ? partners[i] : draws[i];
    for (int k = 0; k < d; ++k) {
      s0[k] += w * x0[k];
      s1[k] += w * x1[k];
    }
  }
  if (!(wsum > 0)) return std::nullopt;
  for (int k = 0; k < d; ++k) {
    s0[k] /= wsum;
    s1[k] /= wsum;
  }
  return DeblendStats::from_means(std::move(s0), std::move(s1));
}

WarpResult warp(std::span<const Vec> points, const Deblender& deblender, const Schedule& schedule,
                VariantKind variant, Integrator integrator) {
  WarpResult result;
  result.points.assign(points.begin(), points.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    try {
      result.points[i] =
          sample_deterministic(deblender, points[i], schedule, variant, integrator).endpoint();
    } catch (const std::exception& e) {
      result.failures.push_back({i, e.what()});
    }
  }
  return result;
}

double sliced_wasserstein(const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
                          Rng& rng) {
  double total = 0;
  for (int p = 0; p < projections; ++p) {
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double cx = std::cos(angle), cy = std::sin(angle);
    std::vector<double> pa(a.size()), pb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = cx * a[i][0] + cy * a[i][1];
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = cx * b[i][0] + cy * b[i][1];
    total += wasserstein1_1d(std::move(pa), std::move(pb));
  }
  return total / projections;
}

}  // namespace iadb::ref
