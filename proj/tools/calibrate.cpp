// Calibration of the statistical noise floors used by the acceptance suite.
// Measures self-distances (two independent draws of the same distribution)
// at the acceptance sample sizes. The measured floors are frozen as
// constants in tests/acceptance.cpp; rerun this tool to re-derive them.

#include <cstdio>
#include <tuple>
#include <vector>

#include "iadb/eval.hpp"
#include "iadb/rng.hpp"

using namespace iadb;

namespace {

double self_w1(const Density& d, std::size_t n, std::uint64_t seed) {
  Rng a(derive_seed(seed, "self-a")), b(derive_seed(seed, "self-b"));
  const auto xs = sample(d, n, a);
  const auto ys = sample(d, n, b);
  return wasserstein1_1d(coordinate(xs, 0), coordinate(ys, 0));
}

double self_sliced(const Density& d, std::size_t n, int projections, std::uint64_t seed) {
  Rng a(derive_seed(seed, "self-a")), b(derive_seed(seed, "self-b"));
  Rng proj(derive_seed(seed, "self-proj"));
  return sliced_wasserstein(sample(d, n, a), sample(d, n, b), projections, proj);
}

}  // namespace

namespace {

/// Self sliced-W of the alpha-blended law of (p0, p1): two independent
/// blended-reference draws compared against each other.
double self_blended(const Density& p0, const Density& p1, double alpha, std::size_t n,
                    int projections, std::uint64_t seed) {
  Rng a(derive_seed(seed, "blend-a")), b(derive_seed(seed, "blend-b"));
  Rng proj(derive_seed(seed, "blend-proj"));
  const auto xs = blended_reference(p0, p1, alpha, n, a);
  const auto ys = blended_reference(p0, p1, alpha, n, b);
  return sliced_wasserstein(xs, ys, projections, proj);
}

}  // namespace

int main() {
  const std::size_t n = 16384;
  const int projections = 256;
  const int reps = 8;

  std::printf("sample size %zu, %d projections, max over %d repetitions\n", n, projections, reps);

  {
    const Density bi(GaussianMixture(1, {{0.5, {-0.5}, {0.1}}, {0.5, {0.5}, {0.1}}}));
    double w = 0;
    for (int r = 0; r < reps; ++r) w = std::max(w, self_w1(bi, n, 1000 + r));
    std::printf("1D bi-Normal self W1 floor:        %.6f\n", w);
  }
  {
    const Density scurve(make_scurve(1000, 0.05));
    double w = 0;
    for (int r = 0; r < reps; ++r) w = std::max(w, self_sliced(scurve, n, projections, 2000 + r));
    std::printf("2D s-curve self sliced-W floor:    %.6f\n", w);
  }
  {
    const Density roll(make_swiss_roll(1000, 0.05));
    double w = 0;
    for (int r = 0; r < reps; ++r) w = std::max(w, self_sliced(roll, n, projections, 3000 + r));
    std::printf("2D swiss-roll self sliced-W floor: %.6f\n", w);
  }
  {
    const Density g(GaussianMixture::single({0.0, 0.0}, {1.0, 1.0}));
    double w = 0;
    for (int r = 0; r < reps; ++r) w = std::max(w, self_sliced(g, n, projections, 4000 + r));
    std::printf("2D Gaussian self sliced-W floor:   %.6f\n", w);
  }

  // Blended-law floors at the intermediate-check alphas (the quantities the
  // acceptance comparisons actually see). One max per transport pair.
  const Density gauss2(GaussianMixture::single({0.0, 0.0}, {1.0, 1.0}));
  const Density scurve(make_scurve(1000, 0.05));
  const Density roll(make_swiss_roll(1000, 0.05));
  using Pair = std::tuple<const char*, const Density*, const Density*>;
  for (const auto& [name, p0, p1] : std::vector<Pair>{{"gauss->scurve", &gauss2, &scurve},
                                                      {"roll->scurve", &roll, &scurve}}) {
    double w = 0;
    for (double alpha : {0.25, 0.5, 0.75, 1.0})
      for (int r = 0; r < reps; ++r)
        w = std::max(w, self_blended(*p0, *p1, alpha, n, projections,
                                     5000 + r + static_cast<int>(alpha * 40)));
    std::printf("blended self floor %-16s %.6f\n", name, w);
  }
  return 0;
}
