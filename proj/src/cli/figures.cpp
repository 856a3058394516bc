#include <algorithm>
#include <cmath>
#include <iostream>

#include "commands.hpp"
#include "iadb/csv.hpp"
#include "iadb/eval.hpp"
#include "iadb/parallel.hpp"
#include "iadb/svg.hpp"

namespace iadb::cli {

namespace {

Mlp require_weights(Run& run, const std::string& key, const std::string& fallback) {
  const std::string name = run.resolved("figure", key, fallback);
  const auto path = run.out_path(name);
  if (!std::filesystem::exists(path))
    throw ConfigError("missing weight file " + path.string() +
                      "; produce it with: iadb train --config <config> --out " +
                      run.out_dir().string());
  return load_weights(path);
}

std::vector<int> int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_number_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

/// Trajectory indices of a uniform schedule hitting the requested alphas.
int alpha_index(double alpha, int T) { return static_cast<int>(std::lround(alpha * T)); }

const std::vector<double> kAlphaGrid{0.0, 0.25, 0.5, 0.75, 1.0};

void fig4(Run& run) {
  const int cells = static_cast<int>(run.resolved_long("figure", "cells", 8));
  const long n_points = run.resolved_long("figure", "points", 256);
  const auto Ts = int_list(run.resolved("figure", "Ts", "32 512 65536"));
  const int side = static_cast<int>(run.resolved_long("figure", "cloud-side", 8));
  const double bw = run.resolved_double("figure", "cloud-bandwidth", 0.08);

  // Kernelized square and disk: the stochastic chain needs mixtures.
  std::vector<Vec> sq_pts;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j)
      sq_pts.push_back({(i + 0.5) / side, (j + 0.5) / side});
  const GaussianMixture square = PointCloudDensity(sq_pts, bw).as_gaussian_mixture();
  Rng disk_rng = Rng(run.seed()).stream("fig4-disk-cloud");
  UniformRegion disk{Disk{{0.5, 0.5}, 0.5}};
  std::vector<Vec> dk_pts;
  for (int i = 0; i < side * side; ++i) dk_pts.push_back(disk.sample(disk_rng));
  const GaussianMixture diskmix = PointCloudDensity(dk_pts, bw).as_gaussian_mixture();

  Rng starts_rng = Rng(run.seed()).stream("fig4-starts");
  UniformRegion unit_square{Rect{{0.0, 0.0}, {1.0, 1.0}}};
  std::vector<Vec> starts;
  for (long i = 0; i < n_points; ++i) starts.push_back(unit_square.sample(starts_rng));
  const CheckerboardLabels labels = checkerboard_labels(starts, cells);

  SvgFigure fig(static_cast<int>(Ts.size()), 1);
  const std::vector<std::string> palette{"#1b6ca8", "#e8772e"};
  for (std::size_t p = 0; p < Ts.size(); ++p) {
    const int T = Ts[p];
    std::vector<Vec> ends(starts.size());
    parallel_for(starts.size(), [&](std::size_t i) {
      Rng chain = Rng(run.seed()).stream("fig4-chain-T" + std::to_string(T), i);
      ends[i] = sample_stochastic(square, diskmix, starts[i], Schedule::uniform(T), chain)
                    .endpoint();
    });
    CsvWriter csv(run.out_path("fig4_T" + std::to_string(T) + ".csv"));
    csv.header({"u", "v", "label", "end_x", "end_y"});
    for (std::size_t i = 0; i < starts.size(); ++i)
      csv.row({starts[i][0], starts[i][1], static_cast<double>(labels.labels[i]), ends[i][0],
               ends[i][1]});
    fig.set_panel(static_cast<int>(p), 0, -0.2, 1.2, -0.2, 1.2, "T=" + std::to_string(T));
    fig.scatter_labeled(static_cast<int>(p), 0, ends, labels.labels, palette, 1.8);
  }
  fig.save(run.out_path("fig4.svg"));
}

void fig5(Run& run) {
  const std::string points_file = run.resolved("figure", "points-file", "data/unit_square_1024.csv");
  const auto input = read_points_csv(points_file);
  const std::unique_ptr<Deblender> deblender = run.make_deblender();
  const WarpResult res = warp(input, *deblender, run.schedule(), run.variant(), run.integrator());
  if (!res.failures.empty())
    throw NumericalError("fig5: " + std::to_string(res.failures.size()) + " points failed to warp");

  CsvWriter csv(run.out_path("fig5_points.csv"));
  csv.header({"u", "v", "end_x", "end_y"});
  for (std::size_t i = 0; i < input.size(); ++i)
    csv.row({input[i][0], input[i][1], res.points[i][0], res.points[i][1]});

  auto window = [](const std::vector<Vec>& pts) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : pts)
      for (double c : p) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    const double pad = 0.1 * (hi - lo + 1e-9);
    return std::pair<double, double>{lo - pad, hi + pad};
  };
  SvgFigure fig(2, 1);
  const auto [ilo, ihi] = window(input);
  const auto [wlo, whi] = window(res.points);
  fig.set_panel(0, 0, ilo, ihi, ilo, ihi, "input points");
  fig.scatter(0, 0, input, "#333", 1.6);
  fig.set_panel(1, 0, wlo, whi, wlo, whi, "warped");
  fig.scatter(1, 0, res.points, "#1b6ca8", 1.6);
  fig.save(run.out_path("fig5.svg"));
}

void fig6(Run& run) {
  const GaussianMixture g0 = run.mixture("p0");
  const GaussianMixture g1 = run.mixture("p1");
  if (g0.dim() != 2) throw ConfigError("fig6: 2D densities required");
  const auto Ts = int_list(run.resolved("figure", "Ts", "2 10 1000"));
  const long bundles = run.resolved_long("figure", "bundles", 10);

  Rng start_rng = Rng(run.seed()).stream("fig6-start");
  const Vec x0 = g0.sample(start_rng);
  const AnalyticGmmDeblender deb(g0, g1);
  const Trajectory det = sample_deterministic(deb, x0, Schedule::uniform(1024));

  CsvWriter csv(run.out_path("fig6_paths.csv"));
  csv.header({"T", "path", "step", "alpha", "x", "y", "deterministic"});
  SvgFigure fig(static_cast<int>(Ts.size()), 1);
  for (std::size_t p = 0; p < Ts.size(); ++p) {
    const int T = Ts[p];
    fig.set_panel(static_cast<int>(p), 0, -2.5, 2.5, -2.5, 2.5, "T=" + std::to_string(T));
    for (long bidx = 0; bidx < bundles; ++bidx) {
      Rng chain = Rng(run.seed()).stream("fig6-chain-T" + std::to_string(T), bidx);
      const Trajectory t = sample_stochastic(g0, g1, x0, Schedule::uniform(T), chain);
      for (std::size_t s = 0; s < t.size(); ++s)
        csv.row({static_cast<double>(T), static_cast<double>(bidx), static_cast<double>(s),
                 t.alphas[s], t.points[s][0], t.points[s][1], 0.0});
      fig.polyline(static_cast<int>(p), 0, t.points, "#c44", 1.0, 0.55);
    }
    for (std::size_t s = 0; s < det.size(); ++s)
      csv.row({static_cast<double>(T), -1.0, static_cast<double>(s), det.alphas[s],
               det.points[s][0], det.points[s][1], 1.0});
    fig.polyline(static_cast<int>(p), 0, det.points, "#000", 1.6);
  }
  fig.save(run.out_path("fig6.svg"));
}

void fig8(Run& run) {
  const GaussianMixture g0 = run.mixture("p0");
  const GaussianMixture g1 = run.mixture("p1");
  if (g0.dim() != 1) throw ConfigError("fig8: 1D densities required");
  const Mlp net_l2 = require_weights(run, "weights-l2", "weights_l2.bin");
  const Mlp net_l1 = require_weights(run, "weights-l1", "weights_l1.bin");
  const long count = run.resolved_long("figure", "count", 20000);
  const int T = static_cast<int>(run.resolved_long("figure", "steps", 128));
  if (T % 4 != 0) throw ConfigError("fig8: steps must be divisible by 4");
  const double lo = run.resolved_double("figure", "hist-lo", -2.0);
  const double hi = run.resolved_double("figure", "hist-hi", 2.0);
  const int bins = static_cast<int>(run.resolved_long("figure", "hist-bins", 64));

  Rng starts_rng = Rng(run.seed()).stream("fig8-starts");
  std::vector<Vec> starts;
  for (long i = 0; i < count; ++i) starts.push_back(g0.sample(starts_rng));

  struct Method {
    std::string name;
    std::unique_ptr<Deblender> deblender;
  };
  std::vector<Method> methods;
  methods.push_back({"analytic_average", std::make_unique<AnalyticGmmDeblender>(g0, g1)});
  methods.push_back({"net_l2", std::make_unique<NeuralDeblender>(net_l2)});
  methods.push_back({"analytic_median", std::make_unique<MedianDeblender1d>(g0, g1)});
  methods.push_back({"net_l1", std::make_unique<NeuralDeblender>(net_l1)});

  CsvWriter csv(run.out_path("fig8_hist.csv"));
  csv.header({"method", "alpha", "bin_center", "density"});

  SvgFigure fig(static_cast<int>(methods.size()) + 1, 1, 260, 200);
  const std::vector<std::string> colors{"#204a87", "#4e9a06", "#c4a000", "#ce5c00", "#a40000"};

  // Reference: exact blended mixture densities, drawn as curves.
  fig.set_panel(0, 0, lo, hi, 0.0, 2.2, "reference p_alpha");
  for (std::size_t ai = 0; ai < kAlphaGrid.size(); ++ai) {
    const double alpha = kAlphaGrid[ai];
    std::vector<GaussianComponent> comps;
    for (const auto& c0 : g0.components())
      for (const auto& c1 : g1.components()) {
        const double m = (1.0 - alpha) * c0.mean[0] + alpha * c1.mean[0];
        const double v = (1.0 - alpha) * (1.0 - alpha) * c0.stddev[0] * c0.stddev[0] +
                         alpha * alpha * c1.stddev[0] * c1.stddev[0];
        comps.push_back({c0.weight * c1.weight, {m}, {std::sqrt(v)}});
      }
    const GaussianMixture blended(1, std::move(comps));
    std::vector<Vec> curve;
    for (int b = 0; b < bins; ++b) {
      const double x = lo + (b + 0.5) * (hi - lo) / bins;
      const double d = blended.pdf({x});
      curve.push_back({x, d});
      csv.raw_row("reference," + format_double(alpha) + "," + format_double(x) + "," +
                  format_double(d));
    }
    fig.polyline(0, 0, curve, colors[ai % colors.size()], 1.2);
  }

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    std::vector<Trajectory> trajs(starts.size());
    const Deblender& deb = *methods[mi].deblender;
    parallel_for(starts.size(), [&](std::size_t i) {
      trajs[i] = sample_deterministic(deb, starts[i], Schedule::uniform(T));
    });
    fig.set_panel(static_cast<int>(mi) + 1, 0, lo, hi, 0.0, 2.2, methods[mi].name);
    for (std::size_t ai = 0; ai < kAlphaGrid.size(); ++ai) {
      const int idx = alpha_index(kAlphaGrid[ai], T);
      std::vector<double> samples;
      samples.reserve(starts.size());
      for (const auto& t : trajs) samples.push_back(t.points[idx][0]);
      const Histogram1d h = Histogram1d::build(samples, lo, hi, bins);
      std::vector<Vec> curve;
      const double norm = static_cast<double>(samples.size()) * (hi - lo) / bins;
      for (int b = 0; b < bins; ++b) {
        const double density = static_cast<double>(h.counts[b]) / norm;
        curve.push_back({h.bin_center(b), density});
        csv.raw_row(methods[mi].name + "," + format_double(kAlphaGrid[ai]) + "," +
                    format_double(h.bin_center(b)) + "," + format_double(density));
      }
      fig.polyline(static_cast<int>(mi) + 1, 0, curve, colors[ai % colors.size()], 1.2);
    }
  }
  fig.save(run.out_path("fig8.svg"));
}

void fig9(Run& run) {
  const Density p0 = run.density("p0");
  const Density p1 = run.density("p1");
  if (p0.dim() != 2) throw ConfigError("fig9: 2D densities required");
  const Mlp net = require_weights(run, "weights", "weights.bin");
  const long count = run.resolved_long("figure", "count", 20000);
  const int T = static_cast<int>(run.resolved_long("figure", "steps", 128));
  if (T % 4 != 0) throw ConfigError("fig9: steps must be divisible by 4");

  Rng starts_rng = Rng(run.seed()).stream("fig9-starts");
  const std::vector<Vec> starts = sample(p0, count, starts_rng);
  const NeuralDeblender deb(net);
  std::vector<Trajectory> trajs(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    trajs[i] = sample_deterministic(deb, starts[i], Schedule::uniform(T));
  });

  CsvWriter csv(run.out_path("fig9_points.csv"));
  csv.header({"kind", "alpha", "x", "y"});  // kind: 0 = iadb, 1 = reference
  SvgFigure fig(static_cast<int>(kAlphaGrid.size()), 2);
  for (std::size_t ai = 0; ai < kAlphaGrid.size(); ++ai) {
    const double alpha = kAlphaGrid[ai];
    const int idx = alpha_index(alpha, T);
    std::vector<Vec> iadb_pts;
    iadb_pts.reserve(starts.size());
    for (const auto& t : trajs) iadb_pts.push_back(t.points[idx]);
    Rng ref_rng = Rng(run.seed()).stream("fig9-ref", ai);
    const std::vector<Vec> ref = blended_reference(p0, p1, alpha, count, ref_rng);
    for (const auto& p : iadb_pts) csv.row({0.0, alpha, p[0], p[1]});
    for (const auto& p : ref) csv.row({1.0, alpha, p[0], p[1]});
    fig.set_panel(static_cast<int>(ai), 0, -1.6, 1.6, -1.6, 1.6,
                  "IADB a=" + format_double(alpha));
    fig.scatter(static_cast<int>(ai), 0, iadb_pts, "#1b6ca8", 0.8);
    fig.set_panel(static_cast<int>(ai), 1, -1.6, 1.6, -1.6, 1.6,
                  "ref a=" + format_double(alpha));
    fig.scatter(static_cast<int>(ai), 1, ref, "#a40000", 0.8);
  }
  fig.save(run.out_path("fig9.svg"));
}

void fig10(Run& run) {
  const Density p0 = run.density("p0");
  const Density p1 = run.density("p1");
  if (p0.dim() != 2) throw ConfigError("fig10: 2D densities required");
  const Mlp net = require_weights(run, "weights", "weights.bin");
  const long count = run.resolved_long("figure", "count", 20000);
  const int T = static_cast<int>(run.resolved_long("figure", "steps", 128));

  Rng starts_rng = Rng(run.seed()).stream("fig10-starts");
  const std::vector<Vec> starts = sample(p0, count, starts_rng);
  Rng ref_rng = Rng(run.seed()).stream("fig10-ref");
  const std::vector<Vec> targets = sample(p1, count, ref_rng);
  const NeuralDeblender deb(net);
  std::vector<Vec> ends(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    ends[i] = sample_deterministic(deb, starts[i], Schedule::uniform(T)).endpoint();
  });

  CsvWriter csv(run.out_path("fig10_points.csv"));
  csv.header({"kind", "x", "y"});  // 0 = p0 sample, 1 = p1 sample, 2 = iadb endpoint
  for (const auto& p : starts) csv.row({0.0, p[0], p[1]});
  for (const auto& p : targets) csv.row({1.0, p[0], p[1]});
  for (const auto& p : ends) csv.row({2.0, p[0], p[1]});

  SvgFigure fig(3, 1);
  fig.set_panel(0, 0, -1.6, 1.6, -1.6, 1.6, "p0 samples");
  fig.scatter(0, 0, starts, "#333", 0.8);
  fig.set_panel(1, 0, -1.6, 1.6, -1.6, 1.6, "p1 samples");
  fig.scatter(1, 0, targets, "#a40000", 0.8);
  fig.set_panel(2, 0, -1.6, 1.6, -1.6, 1.6, "IADB endpoints");
  fig.scatter(2, 0, ends, "#4e9a06", 0.8);
  fig.save(run.out_path("fig10.svg"));
}

}  // namespace

void cmd_figure(Run& run, const std::string& which) {
  if (which == "fig4")
    fig4(run);
  else if (which == "fig5")
    fig5(run);
  else if (which == "fig6")
    fig6(run);
  else if (which == "fig8")
    fig8(run);
  else if (which == "fig9")
    fig9(run);
  else if (which == "fig10")
    fig10(run);
  else
    throw ConfigError("figure: unknown figure '" + which +
                      "' (expected fig4|fig5|fig6|fig8|fig9|fig10)");
  run.note("figure", which);
  run.write_manifest();
  std::cout << "wrote " << run.out_path(which + ".svg").string() << "\n";
}

}  // namespace iadb::cli
