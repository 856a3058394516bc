#include "iadb/samplers.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "iadb/parallel.hpp"

namespace iadb {

Schedule::Schedule(Kind kind, int steps) : kind_(kind), steps_(steps) {
  if (steps_ < 1) throw std::invalid_argument("Schedule: T must be >= 1");
}

Schedule Schedule::uniform(int steps) { return Schedule(Kind::uniform, steps); }
Schedule Schedule::cosine(int steps) { return Schedule(Kind::cosine, steps); }

double Schedule::alpha_of(double u) const {
  if (u <= 0) return 0.0;
  if (u >= 1) return 1.0;
  return kind_ == Kind::uniform ? u : 1.0 - std::cos(u * std::numbers::pi / 2.0);
}

double Schedule::alpha_at(int t) const {
  return alpha_of(static_cast<double>(t) / static_cast<double>(steps_));
}

double Schedule::alpha_mid(int t) const {
  return alpha_of((static_cast<double>(t) + 0.5) / static_cast<double>(steps_));
}

Vec step_variant(VariantKind kind, const Vec& x, double alpha_t, double alpha_next,
                 const DeblendStats& stats) {
  switch (kind) {
    case VariantKind::A: {
      Vec out(x.size());
      for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = (1.0 - alpha_next) * stats.xbar0[k] + alpha_next * stats.xbar1[k];
      return out;
    }
    case VariantKind::B: {
      if (!(alpha_t > 0.0))
        throw std::invalid_argument("step_variant: variant B is undefined at alpha_t = 0");
      const double r = alpha_next / alpha_t;
      Vec out(x.size());
      for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = stats.xbar0[k] + r * (x[k] - stats.xbar0[k]);
      return out;
    }
    case VariantKind::C: {
      if (!(alpha_t < 1.0))
        throw std::invalid_argument("step_variant: variant C is undefined at alpha_t = 1");
      const double r = (1.0 - alpha_next) / (1.0 - alpha_t);
      Vec out(x.size());
      for (std::size_t k = 0; k < x.size(); ++k)
        out[k] = stats.xbar1[k] + r * (x[k] - stats.xbar1[k]);
      return out;
    }
    case VariantKind::D:
      return axpy(x, alpha_next - alpha_t, stats.diff);
  }
  throw std::logic_error("step_variant: unknown variant");
}

Trajectory sample_deterministic(const Deblender& deblender, const Vec& x0,
                                const Schedule& schedule, VariantKind variant,
                                Integrator integrator) {
  if (integrator == Integrator::rk2 && variant != VariantKind::D)
    throw std::invalid_argument("sample_deterministic: rk2 requires variant D");
  check_dim(x0, static_cast<std::size_t>(deblender.dim()), "sample_deterministic");
  const int T = schedule.steps();
  Trajectory traj;
  traj.alphas.reserve(T + 1);
  traj.points.reserve(T + 1);
  traj.alphas.push_back(schedule.alpha_at(0));
  traj.points.push_back(x0);
  Vec x = x0;
  for (int t = 0; t < T; ++t) {
    const double a = schedule.alpha_at(t);
    const double a_next = schedule.alpha_at(t + 1);
    try {
      if (integrator == Integrator::rk2) {
        const double a_mid = schedule.alpha_mid(t);
        const DeblendStats s0 = deblender.stats(x, a);
        const Vec x_mid = axpy(x, a_mid - a, s0.diff);
        const DeblendStats s_mid = deblender.stats(x_mid, a_mid);
        x = axpy(x, a_next - a, s_mid.diff);
      } else {
        // Variant B cannot take its first step from alpha = 0; bootstrap it
        // with one variant-D step (variant C has no symmetric issue: the
        // loop never evaluates it at alpha_t = 1).
        const VariantKind step_kind =
            (variant == VariantKind::B && a == 0.0) ? VariantKind::D : variant;
        const DeblendStats s = deblender.stats(x, a);
        x = step_variant(step_kind, x, a, a_next, s);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("sample_deterministic: step " + std::to_string(t) + ": " +
                               e.what());
    }
    if (!all_finite(x))
      throw std::runtime_error("sample_deterministic: non-finite state at step " +
                               std::to_string(t));
    traj.alphas.push_back(a_next);
    traj.points.push_back(x);
  }
  return traj;
}

Trajectory sample_stochastic(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                             const Vec& x0, const Schedule& schedule, Rng& rng) {
  if (schedule.kind() != Schedule::Kind::uniform)
    throw std::invalid_argument("sample_stochastic: uniform schedules only");
  check_dim(x0, static_cast<std::size_t>(gmm0.dim()), "sample_stochastic");
  const int T = schedule.steps();
  Trajectory traj;
  traj.alphas.reserve(T + 1);
  traj.points.reserve(T + 1);
  traj.alphas.push_back(0.0);
  traj.points.push_back(x0);
  Vec x = x0;
  for (int t = 0; t < T; ++t) {
    const double a = schedule.alpha_at(t);
    const double a_next = schedule.alpha_at(t + 1);
    auto [p0, p1] = posterior_sample(gmm0, gmm1, x, a, rng);
    for (std::size_t k = 0; k < x.size(); ++k)
      x[k] = (1.0 - a_next) * p0[k] + a_next * p1[k];
    traj.alphas.push_back(a_next);
    traj.points.push_back(x);
  }
  return traj;
}

WarpResult warp(std::span<const Vec> points, const Deblender& deblender, const Schedule& schedule,
                VariantKind variant, Integrator integrator) {
  WarpResult result;
  result.points.assign(points.begin(), points.end());
  std::vector<std::string> errors(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    try {
      result.points[i] =
          sample_deterministic(deblender, points[i], schedule, variant, integrator).endpoint();
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) result.failures.push_back({i, errors[i]});
  return result;
}

}  // namespace iadb
