#include "iadb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iadb/parallel.hpp"

namespace iadb {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

void check_alpha_closed(double alpha, const char* what) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument(std::string(what) + ": alpha must be in [0,1]");
}

/// Per-pair posterior scan over the component pairs of two diagonal
/// mixtures, at a fixed query (x, alpha).
///
/// For pair (i,j), the evidence of x is N(x; (1-a)mu_i + a*nu_j,
/// (1-a)^2 Sig_i + a^2 Lam_j) and the conditional laws of x0 and x1 given x
/// are Gaussian per axis:
///
///   D  = a^2 lam^2 + (1-a)^2 sig^2
///   m0 = (mu a^2 lam^2 + sig^2 (1-a)(x - a nu)) / D,   v0 = sig^2 a^2 lam^2 / D
///   m1 = (nu (1-a)^2 sig^2 + a lam^2 (x - (1-a) mu)) / D,  v1 = lam^2 (1-a)^2 sig^2 / D
///
/// which blend back to x exactly: (1-a) m0 + a m1 = x.
struct PairScan {
  const GaussianMixture& g0;
  const GaussianMixture& g1;
  const Vec& x;
  double alpha;
  int d;
  std::size_t n0, n1;
  std::vector<double> log_resp;  // n0*n1, unnormalized
  double max_log = -std::numeric_limits<double>::infinity();

  PairScan(const GaussianMixture& gmm0, const GaussianMixture& gmm1, const Vec& x_, double a)
      : g0(gmm0), g1(gmm1), x(x_), alpha(a), d(gmm0.dim()),
        n0(gmm0.size()), n1(gmm1.size()) {
    if (gmm1.dim() != d) throw std::invalid_argument("posterior scan: mixture dimension mismatch");
    check_dim(x, static_cast<std::size_t>(d), "posterior scan");
    log_resp.resize(n0 * n1);

    // Per-side terms of the pair evidence N(x; (1-a)mu + a nu, V0 + V1).
    const double b0 = (1.0 - alpha) * (1.0 - alpha);
    const double b1 = alpha * alpha;
    std::vector<double> a0(n0 * d), a1(n1 * d), v0(n0 * d), v1(n1 * d), lw0(n0), lw1(n1);
    for (std::size_t i = 0; i < n0; ++i) {
      const auto& c = g0.components()[i];
      lw0[i] = std::log(c.weight);
      for (int k = 0; k < d; ++k) {
        a0[i * d + k] = (1.0 - alpha) * c.mean[k];
        v0[i * d + k] = b0 * c.stddev[k] * c.stddev[k];
      }
    }
    for (std::size_t j = 0; j < n1; ++j) {
      const auto& c = g1.components()[j];
      lw1[j] = std::log(c.weight);
      for (int k = 0; k < d; ++k) {
        a1[j * d + k] = alpha * c.mean[k];
        v1[j * d + k] = b1 * c.stddev[k] * c.stddev[k];
      }
    }

    // Uniform-variance mixtures (kernelized point clouds) share one V across
    // pairs; hoisting the log-determinant leaves a pure quadratic scan.
    auto rows_equal = [dim = d](const std::vector<double>& v, std::size_t n) {
      for (std::size_t r = 1; r < n; ++r)
        for (int k = 0; k < dim; ++k)
          if (v[r * dim + k] != v[k]) return false;
      return true;
    };
    if (d <= 8 && rows_equal(v0, n0) && rows_equal(v1, n1)) {
      double base = -0.5 * d * kLogTwoPi;
      double inv2v[8];
      for (int k = 0; k < d && k < 8; ++k) {
        const double v = v0[k] + v1[k];
        base -= 0.5 * std::log(v);
        inv2v[k] = 0.5 / v;
      }
      for (std::size_t i = 0; i < n0; ++i) {
        const double* mi = a0.data() + i * d;
        const double head = base + lw0[i];
        for (std::size_t j = 0; j < n1; ++j) {
          const double* mj = a1.data() + j * d;
          double quad = 0;
          for (int k = 0; k < d; ++k) {
            const double r = x[k] - mi[k] - mj[k];
            quad += r * r * inv2v[k];
          }
          const double lr = head + lw1[j] - quad;
          log_resp[i * n1 + j] = lr;
          max_log = std::max(max_log, lr);
        }
      }
      return;
    }

    for (std::size_t i = 0; i < n0; ++i) {
      const double* mi = a0.data() + i * d;
      const double* vi = v0.data() + i * d;
      for (std::size_t j = 0; j < n1; ++j) {
        const double* mj = a1.data() + j * d;
        const double* vj = v1.data() + j * d;
        double lr = lw0[i] + lw1[j];
        for (int k = 0; k < d; ++k) {
          const double v = vi[k] + vj[k];
          const double r = x[k] - mi[k] - mj[k];
          lr += -0.5 * (r * r / v + std::log(v) + kLogTwoPi);
        }
        log_resp[i * n1 + j] = lr;
        max_log = std::max(max_log, lr);
      }
    }
  }

  bool reachable() const { return std::isfinite(max_log); }

  /// Conditional moments of the pair posterior along one axis.
  void conditional(std::size_t i, std::size_t j, int k, double& m0, double& m1, double& v0,
                   double& v1) const {
    const auto& c0 = g0.components()[i];
    const auto& c1 = g1.components()[j];
    const double s2 = c0.stddev[k] * c0.stddev[k];
    const double l2 = c1.stddev[k] * c1.stddev[k];
    const double a = alpha, b = 1.0 - alpha;
    const double den = a * a * l2 + b * b * s2;
    m0 = (c0.mean[k] * a * a * l2 + s2 * b * (x[k] - a * c1.mean[k])) / den;
    m1 = (c1.mean[k] * b * b * s2 + a * l2 * (x[k] - b * c0.mean[k])) / den;
    v0 = s2 * a * a * l2 / den;
    v1 = l2 * b * b * s2 / den;
  }
};

GaussianMixture subsample_mixture(const GaussianMixture& g, std::size_t keep, Rng& rng) {
  const std::size_t n = g.size();
  if (keep >= n) return g;
  // Partial Fisher-Yates over indices, then renormalize.
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < keep; ++i)
    std::swap(idx[i], idx[i + rng.uniform_index(n - i)]);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  double wsum = 0;
  for (std::size_t i : idx) wsum += g.components()[i].weight;
  std::vector<GaussianComponent> comps;
  comps.reserve(keep);
  for (std::size_t i : idx) {
    GaussianComponent c = g.components()[i];
    c.weight /= wsum;
    comps.push_back(std::move(c));
  }
  return GaussianMixture(g.dim(), std::move(comps));
}

/// Applies the pair budget: uniformly subsamples both mixtures so that the
/// pair count fits. Returns true when anything was dropped.
bool apply_pair_budget(GaussianMixture& g0, GaussianMixture& g1,
                       const AnalyticOracleOptions& opts) {
  const std::size_t pairs = g0.size() * g1.size();
  if (opts.exact || pairs <= opts.pair_budget) return false;
  const double f = std::sqrt(static_cast<double>(opts.pair_budget) / static_cast<double>(pairs));
  const auto target = [&](std::size_t n) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(n) * f));
  };
  Rng rng(derive_seed(opts.subsample_seed, "oracle-pair-budget"));
  g0 = subsample_mixture(g0, target(g0.size()), rng);
  g1 = subsample_mixture(g1, target(g1.size()), rng);
  return true;
}

double mixture_cdf(const std::vector<double>& w, const std::vector<double>& m,
                   const std::vector<double>& s, double t) {
  double c = 0;
  for (std::size_t i = 0; i < w.size(); ++i)
    c += w[i] * 0.5 * std::erfc(-(t - m[i]) / (s[i] * std::sqrt(2.0)));
  return c;
}

/// Median of a 1D Gaussian mixture by bisection on its CDF.
double mixture_median(const std::vector<double>& w, const std::vector<double>& m,
                      const std::vector<double>& s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    lo = std::min(lo, m[i] - 12.0 * s[i]);
    hi = std::max(hi, m[i] + 12.0 * s[i]);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mixture_cdf(w, m, s, mid) < 0.5 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DeblendStats DeblendStats::from_means(Vec xbar0, Vec xbar1) {
  DeblendStats s;
  s.diff = sub(xbar1, xbar0);
  s.xbar0 = std::move(xbar0);
  s.xbar1 = std::move(xbar1);
  return s;
}

DeblendStats DeblendStats::from_diff(const Vec& x, double alpha, const Vec& d) {
  check_dim(d, x.size(), "DeblendStats::from_diff");
  return from_means(axpy(x, -alpha, d), axpy(x, 1.0 - alpha, d));
}

DeblendStats analytic_posterior_stats(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                      const Vec& x, double alpha,
                                      const AnalyticOracleOptions& opts) {
  check_alpha_closed(alpha, "analytic_posterior_stats");
  GaussianMixture g0 = gmm0, g1 = gmm1;
  apply_pair_budget(g0, g1, opts);
  PairScan scan(g0, g1, x, alpha);
  const int d = scan.d;
  Vec m0_acc(d, 0.0), m1_acc(d, 0.0);
  double wsum = 0;
  const double cutoff = scan.max_log - opts.prune_nats;
  for (std::size_t i = 0; i < scan.n0; ++i) {
    for (std::size_t j = 0; j < scan.n1; ++j) {
      const double lr = scan.log_resp[i * scan.n1 + j];
      if (lr < cutoff) continue;
      const double w = std::exp(lr - scan.max_log);
      wsum += w;
      for (int k = 0; k < d; ++k) {
        double m0, m1, v0, v1;
        scan.conditional(i, j, k, m0, m1, v0, v1);
        m0_acc[k] += w * m0;
        m1_acc[k] += w * m1;
      }
    }
  }
  if (!(wsum > 0))
    throw std::runtime_error("analytic_posterior_stats: query has no posterior mass");
  for (int k = 0; k < d; ++k) {
    m0_acc[k] /= wsum;
    m1_acc[k] /= wsum;
  }
  return DeblendStats::from_means(std::move(m0_acc), std::move(m1_acc));
}

std::optional<DeblendStats> mc_posterior_stats(const Density& p0, const Density& p1, const Vec& x,
                                               double alpha, std::size_t n, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("mc_posterior_stats: alpha must be in (0,1)");
  if (n < 1) throw std::invalid_argument("mc_posterior_stats: n must be >= 1");
  const int d = p0.dim();
  if (p1.dim() != d) throw std::invalid_argument("mc_posterior_stats: density dimension mismatch");
  check_dim(x, static_cast<std::size_t>(d), "mc_posterior_stats");

  // The direction switch at alpha = 1/2 balances the variance of the two
  // symmetric estimators: propose from the side with the larger blend
  // coefficient, weight by the density of the implied partner.
  const bool propose_x1 = alpha <= 0.5;
  const Density& proposal = propose_x1 ? p1 : p0;
  const Density& weighting = propose_x1 ? p0 : p1;

  // Proposals are drawn serially so results do not depend on the thread
  // count; the weighting pass is a pure map.
  const std::vector<Vec> draws = sample(proposal, n, rng);
  std::vector<double> logw(n);
  std::vector<Vec> partners(n);
  parallel_for(n, [&](std::size_t i) {
    Vec partner(d);
    if (propose_x1) {
      for (int k = 0; k < d; ++k) partner[k] = (x[k] - alpha * draws[i][k]) / (1.0 - alpha);
    } else {
      for (int k = 0; k < d; ++k) partner[k] = (x[k] - (1.0 - alpha) * draws[i][k]) / alpha;
    }
    logw[i] = log_pdf(weighting, partner);
    partners[i] = std::move(partner);
  });

  double max_lw = -std::numeric_limits<double>::infinity();
  for (double lw : logw) max_lw = std::max(max_lw, lw);
  if (!std::isfinite(max_lw)) return std::nullopt;  // all weights zero

  struct Acc {
    double wsum = 0;
    Vec s0, s1;
  };
  Acc total;
  total.s0.assign(d, 0.0);
  total.s1.assign(d, 0.0);
  blocked_reduce(
      n, total,
      [&] {
        Acc a;
        a.s0.assign(d, 0.0);
        a.s1.assign(d, 0.0);
        return a;
      },
      [&](Acc& a, std::size_t i) {
        const double w = std::exp(logw[i] - max_lw);
        a.wsum += w;
        const Vec& x1 = propose_x1 ? draws[i] : partners[i];
        const Vec& x0 = propose_x1 ? partners[i] : draws[i];
        for (int k = 0; k < d; ++k) {
          a.s0[k] += w * x0[k];
          a.s1[k] += w * x1[k];
        }
      },
      [&](Acc& t, const Acc& a) {
        t.wsum += a.wsum;
        for (int k = 0; k < d; ++k) {
          t.s0[k] += a.s0[k];
          t.s1[k] += a.s1[k];
        }
      });

  if (!(total.wsum > 0)) return std::nullopt;
  Vec m0(d), m1(d);
  for (int k = 0; k < d; ++k) {
    m0[k] = total.s0[k] / total.wsum;
    m1[k] = total.s1[k] / total.wsum;
  }
  return DeblendStats::from_means(std::move(m0), std::move(m1));
}

std::pair<Vec, Vec> posterior_sample(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                                     const Vec& x, double alpha, Rng& rng) {
  check_alpha_closed(alpha, "posterior_sample");
  const int d = gmm0.dim();
  check_dim(x, static_cast<std::size_t>(d), "posterior_sample");
  if (alpha == 0.0) return {x, gmm1.sample(rng)};
  if (alpha == 1.0) return {gmm0.sample(rng), x};

  PairScan scan(gmm0, gmm1, x, alpha);
  if (!scan.reachable())
    throw std::runtime_error("posterior_sample: query has no posterior mass");
  // Select a pair by responsibility.
  thread_local std::vector<double> prob;
  prob.resize(scan.log_resp.size());
  double total = 0;
  for (std::size_t p = 0; p < prob.size(); ++p) {
    const double lr = scan.log_resp[p] - scan.max_log;
    prob[p] = lr > -40.0 ? std::exp(lr) : 0.0;
    total += prob[p];
  }
  const double u = rng.uniform() * total;
  std::size_t pick = prob.size() - 1;
  double acc = 0;
  for (std::size_t p = 0; p < prob.size(); ++p) {
    acc += prob[p];
    if (u < acc) {
      pick = p;
      break;
    }
  }
  const std::size_t i = pick / scan.n1, j = pick % scan.n1;

  // Draw x0 from the pair conditional, derive x1 on the blend line.
  Vec x0(d), x1(d);
  for (int k = 0; k < d; ++k) {
    double m0, m1, v0, v1;
    scan.conditional(i, j, k, m0, m1, v0, v1);
    x0[k] = m0 + std::sqrt(v0) * rng.normal();
    x1[k] = (x[k] - (1.0 - alpha) * x0[k]) / alpha;
  }
  return {std::move(x0), std::move(x1)};
}

double posterior_diff_median(const GaussianMixture& gmm0, const GaussianMixture& gmm1, double x,
                             double alpha) {
  check_alpha_closed(alpha, "posterior_diff_median");
  if (gmm0.dim() != 1 || gmm1.dim() != 1)
    throw std::invalid_argument("posterior_diff_median: 1D mixtures only");
  auto prior_median = [](const GaussianMixture& g) {
    std::vector<double> w, m, s;
    for (const auto& c : g.components()) {
      w.push_back(c.weight);
      m.push_back(c.mean[0]);
      s.push_back(c.stddev[0]);
    }
    return mixture_median(w, m, s);
  };
  if (alpha == 0.0) return prior_median(gmm1) - x;
  if (alpha == 1.0) return x - prior_median(gmm0);

  const Vec q{x};
  PairScan scan(gmm0, gmm1, q, alpha);
  if (!scan.reachable())
    throw std::runtime_error("posterior_diff_median: query has no posterior mass");
  std::vector<double> w, m, s;
  w.reserve(scan.log_resp.size());
  double total = 0;
  // diff = (x - x0)/alpha = (x1 - x)/(1-alpha); the median commutes with
  // either monotone map. Use the side whose divisor is >= 1/2.
  const bool via_x0 = alpha >= 0.5;
  for (std::size_t i = 0; i < scan.n0; ++i) {
    for (std::size_t j = 0; j < scan.n1; ++j) {
      const double lr = scan.log_resp[i * scan.n1 + j] - scan.max_log;
      if (lr < -40.0) continue;
      double m0, m1, v0, v1;
      scan.conditional(i, j, 0, m0, m1, v0, v1);
      const double wt = std::exp(lr);
      w.push_back(wt);
      total += wt;
      m.push_back(via_x0 ? m0 : m1);
      s.push_back(std::sqrt(via_x0 ? v0 : v1));
    }
  }
  for (auto& wt : w) wt /= total;
  const double med = mixture_median(w, m, s);
  return via_x0 ? (x - med) / alpha : (med - x) / (1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Deblender realizations

AnalyticGmmDeblender::AnalyticGmmDeblender(GaussianMixture gmm0, GaussianMixture gmm1,
                                           AnalyticOracleOptions opts)
    : gmm0_(std::move(gmm0)), gmm1_(std::move(gmm1)), opts_(opts) {
  if (gmm0_.dim() != gmm1_.dim())
    throw std::invalid_argument("AnalyticGmmDeblender: mixture dimension mismatch");
  subsampled_ = apply_pair_budget(gmm0_, gmm1_, opts_);
  opts_.exact = true;  // the budget was applied once, at construction
}

DeblendStats AnalyticGmmDeblender::stats(const Vec& x, double alpha) const {
  return analytic_posterior_stats(gmm0_, gmm1_, x, alpha, opts_);
}

MedianDeblender1d::MedianDeblender1d(GaussianMixture gmm0, GaussianMixture gmm1)
    : gmm0_(std::move(gmm0)), gmm1_(std::move(gmm1)) {
  if (gmm0_.dim() != 1 || gmm1_.dim() != 1)
    throw std::invalid_argument("MedianDeblender1d: 1D mixtures only");
}

DeblendStats MedianDeblender1d::stats(const Vec& x, double alpha) const {
  const double med = posterior_diff_median(gmm0_, gmm1_, x[0], alpha);
  return DeblendStats::from_diff(x, alpha, Vec{med});
}

MonteCarloDeblender::MonteCarloDeblender(Density p0, Density p1, std::size_t samples, Rng rng)
    : p0_(std::move(p0)), p1_(std::move(p1)), samples_(samples), rng_(rng) {
  if (p0_.dim() != p1_.dim())
    throw std::invalid_argument("MonteCarloDeblender: density dimension mismatch");
}

DeblendStats MonteCarloDeblender::stats(const Vec& x, double alpha) const {
  // The endpoints have degenerate posteriors; handle them directly so the
  // deblender can drive full 0-to-1 trajectories.
  if (alpha == 0.0 || alpha == 1.0) {
    Rng local = rng_;
    const std::vector<Vec> draws = sample(alpha == 0.0 ? p1_ : p0_, samples_, local);
    rng_ = local;
    Vec mean(x.size(), 0.0);
    for (const auto& v : draws)
      for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += v[k] / static_cast<double>(samples_);
    return alpha == 0.0 ? DeblendStats::from_means(x, std::move(mean))
                        : DeblendStats::from_means(std::move(mean), x);
  }
  auto stats = mc_posterior_stats(p0_, p1_, x, alpha, samples_, rng_);
  if (!stats)
    throw std::runtime_error("MonteCarloDeblender: estimation failure (all weights zero)");
  return *std::move(stats);
}

}  // namespace iadb
