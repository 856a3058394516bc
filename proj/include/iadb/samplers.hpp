#pragma once

#include <span>
#include <string>
#include <vector>

#include "iadb/oracle.hpp"

namespace iadb {

/// Blending schedule alpha_t for t = 0..T. Uniform: alpha_t = t/T.
/// Cosine: alpha_t = 1 - cos((t/T)(pi/2)). Both start at 0 and end at 1 and
/// are strictly increasing.
class Schedule {
 public:
  enum class Kind { uniform, cosine };

  static Schedule uniform(int steps);
  static Schedule cosine(int steps);

  Kind kind() const { return kind_; }
  int steps() const { return steps_; }

  /// alpha at fractional position u = t/T in [0,1].
  double alpha_of(double u) const;
  double alpha_at(int t) const;
  /// alpha at the half-step t + 1/2 (second-order integrator stage).
  double alpha_mid(int t) const;

 private:
  Schedule(Kind kind, int steps);
  Kind kind_;
  int steps_;
};

/// The four algebraically equivalent one-step update rules.
///   A: re-blend both means      x' = (1-a')xbar0 + a'xbar1
///   B: anchor on xbar0          x' = xbar0 + (a'/a)(x - xbar0)
///   C: anchor on xbar1          x' = xbar1 + ((1-a')/(1-a))(x - xbar1)
///   D: follow the difference    x' = x + (a'-a)(xbar1 - xbar0)
/// B divides by a and is undefined at a = 0; C divides by (1-a) and is
/// undefined at a = 1.
enum class VariantKind { A, B, C, D };

enum class Integrator { euler, rk2 };

/// Ordered (alpha, point) states of one sampler run.
struct Trajectory {
  std::vector<double> alphas;
  std::vector<Vec> points;

  std::size_t size() const { return points.size(); }
  const Vec& endpoint() const { return points.back(); }
};

Vec step_variant(VariantKind kind, const Vec& x, double alpha_t, double alpha_next,
                 const DeblendStats& stats);

/// Deterministic iterative deblend/reblend: T+1 states from alpha = 0 to 1.
/// rk2 performs the half-step/full-step stage pair and is only defined for
/// variant D. Variant B's first step (alpha = 0) is taken with the variant-D
/// rule, mirroring the epsilon-offset start used by denoiser-style samplers.
Trajectory sample_deterministic(const Deblender& deblender, const Vec& x0,
                                const Schedule& schedule, VariantKind variant = VariantKind::D,
                                Integrator integrator = Integrator::euler);

/// Stochastic chain: each step draws an exact posterior pair and re-blends
/// at the next alpha. Every intermediate state is an exact sample of its
/// blended density. Uniform schedules only.
Trajectory sample_stochastic(const GaussianMixture& gmm0, const GaussianMixture& gmm1,
                             const Vec& x0, const Schedule& schedule, Rng& rng);

struct WarpFailure {
  std::size_t index;
  std::string message;
};

struct WarpResult {
  std::vector<Vec> points;          // order matches the input
  std::vector<WarpFailure> failures;  // indices of points that failed
};

/// Pushes each point independently through the deterministic sampler.
/// Parallelized over points; per-point failures are collected, and the
/// corresponding output slots keep the input point.
WarpResult warp(std::span<const Vec> points, const Deblender& deblender, const Schedule& schedule,
                VariantKind variant = VariantKind::D, Integrator integrator = Integrator::euler);

}  // namespace iadb
