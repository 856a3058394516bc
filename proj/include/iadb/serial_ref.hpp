#pragma once

#include <optional>
#include <span>

#include "iadb/eval.hpp"
#include "iadb/nn.hpp"
#include "iadb/oracle.hpp"
#include "iadb/samplers.hpp"

namespace iadb::ref {

/// Plain single-threaded implementations of the hot kernels, written
/// independently of the OpenMP paths (natural-order accumulation, no
/// blocking). Kept for testing the parallel kernels against and for the
/// benchmark target. Reductions here differ from the blocked ones only by
/// floating-point association, so comparisons use small tolerances.

double loss_and_grads(const Mlp& net, std::span<const TrainSample> batch, LossKind kind,
                      Gradients& grads);

std::optional<DeblendStats> mc_posterior_stats(const Density& p0, const Density& p1, const Vec& x,
                                               double alpha, std::size_t n, Rng& rng);

WarpResult warp(std::span<const Vec> points, const Deblender& deblender, const Schedule& schedule,
                VariantKind variant = VariantKind::D, Integrator integrator = Integrator::euler);

double sliced_wasserstein(const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
                          Rng& rng);

}  // namespace iadb::ref
