#pragma once

#include <functional>
#include <vector>

#include "iadb/vec.hpp"

namespace iadb {

/// Cumulative noise-schedule products of a denoiser-style sampler (the
/// alpha_bar convention). Entries lie in (0,1] and strictly decrease along
/// the chain; alpha_bar is NOT the blend weight used elsewhere in this
/// library. The rescaling below maps between the two conventions.
struct DdimSchedule {
  std::vector<double> alphas_bar;

  void validate() const;
  std::size_t size() const { return alphas_bar.size(); }
};

/// A state expressed in both coordinate systems:
///   y    = x / (sqrt(ab) + sqrt(1-ab))
///   beta = sqrt(ab) / (sqrt(ab) + sqrt(1-ab))
/// y is a blended sample with blend weight beta.
struct BridgeFrame {
  Vec x_ddim;
  Vec y_iadb;
  double beta = 1.0;
};

/// beta for a given alpha_bar in (0,1].
double bridge_beta(double alpha_bar);

/// Rescales a DDIM-coordinate point into the blended frame.
BridgeFrame rescale(const Vec& x, double alpha_bar);

/// One step of the deterministic denoiser update,
///   x'/sqrt(ab') = x/sqrt(ab) + (sqrt((1-ab')/ab') - sqrt((1-ab)/ab)) * eps.
Vec ddim_step(const Vec& x_t, double alpha_bar_t, double alpha_bar_next,
              const Vec& eps_prediction);

/// Noise predictor: (x in DDIM coordinates, step index) -> epsilon estimate.
using EpsFn = std::function<Vec(const Vec&, std::size_t)>;

struct EquivalenceReport {
  /// Per-step max absolute coordinate deviation between the rescaled DDIM
  /// chain and the variant-B chain run in the blended frame.
  std::vector<double> per_step_deviation;
  double max_deviation = 0.0;
  bool passed = false;  // max_deviation < 1e-9
};

/// Runs the DDIM chain and the variant-B chain in rescaled coordinates with
/// the same predictor and reports their per-step deviation. The two updates
/// are the same algebraic map, so the deviation is rounding noise for any
/// predictor and any valid schedule.
EquivalenceReport equivalence_check(const DdimSchedule& schedule, const EpsFn& eps_fn,
                                    const Vec& x_start);

}  // namespace iadb
