// Benchmark comparing the OpenMP kernels against the serial reference
// implementations. Sizes are desk-scale; pass a scale factor to grow them.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "iadb/parallel.hpp"
#include "iadb/serial_ref.hpp"

using namespace iadb;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& f) {
  const auto t0 = Clock::now();
  f();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

GaussianMixture binormal() {
  return GaussianMixture(1, {{0.5, {-0.5}, {0.1}}, {0.5, {0.5}, {0.1}}});
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  std::printf("threads: %d (cap with IADB_THREADS)\n", max_threads());

  {  // batched loss/gradients
    const Mlp net = make_deblender_mlp(2, 5, 64, Activation::gelu, 1);
    Rng rng(2);
    std::vector<TrainSample> batch(1024 * scale);
    for (auto& s : batch) {
      s.x0 = {rng.normal(), rng.normal()};
      s.x1 = {rng.normal(), rng.normal()};
      s.alpha = rng.uniform();
    }
    Gradients g;
    const double ts = time_ms([&] { ref::loss_and_grads(net, batch, LossKind::l2, g); });
    const double tp = time_ms([&] { loss_and_grads(net, batch, LossKind::l2, g); });
    report("loss_and_grads", ts, tp);
  }

  {  // Monte-Carlo posterior estimate
    const Density p0(binormal()), p1(GaussianMixture::single({0.0}, {1.0}));
    Rng a(3), b(3);
    std::optional<DeblendStats> r;
    const double ts =
        time_ms([&] { r = ref::mc_posterior_stats(p0, p1, {0.3}, 0.4, 400000 * scale, a); });
    const double tp =
        time_ms([&] { r = mc_posterior_stats(p0, p1, {0.3}, 0.4, 400000 * scale, b); });
    report("mc_posterior_stats", ts, tp);
  }

  {  // point-set warp
    const AnalyticGmmDeblender deb(GaussianMixture::single({0.0}, {1.0}), binormal());
    Rng rng(4);
    std::vector<Vec> pts(2000 * scale);
    for (auto& p : pts) p = {rng.normal()};
    WarpResult r;
    const double ts = time_ms([&] { r = ref::warp(pts, deb, Schedule::uniform(128)); });
    const double tp = time_ms([&] { r = warp(pts, deb, Schedule::uniform(128)); });
    report("warp", ts, tp);
  }

  {  // sliced Wasserstein
    Rng rng(5);
    std::vector<Vec> a(20000 * scale), b(20000 * scale);
    for (auto& p : a) p = {rng.normal(), rng.normal()};
    for (auto& p : b) p = {rng.normal() + 0.1, rng.normal()};
    Rng pa(6), pb(6);
    double v = 0;
    const double ts = time_ms([&] { v = ref::sliced_wasserstein(a, b, 128, pa); });
    const double tp = time_ms([&] { v += sliced_wasserstein(a, b, 128, pb); });
    report("sliced_wasserstein", ts, tp);
  }
  return 0;
}
