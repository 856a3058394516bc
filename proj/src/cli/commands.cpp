#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

#include "iadb/csv.hpp"
#include "iadb/ddim.hpp"
#include "iadb/eval.hpp"
#include "iadb/parallel.hpp"

namespace iadb::cli {

void cmd_train(Run& run) {
  const Density p0 = run.density("p0");
  const Density p1 = run.density("p1");
  const TrainConfig cfg = run.train_config();
  const Mlp init = run.initial_net(p0.dim());
  const std::string weights_name = run.resolved("train", "weights-out", "weights.bin");
  const std::string loss_name = run.resolved("train", "loss-csv", "loss.csv");

  TrainResult result;
  try {
    result = train(init, p0, p1, cfg);
  } catch (const std::runtime_error& e) {
    throw NumericalError(e.what());
  }
  save_weights(result.net, run.out_path(weights_name));
  CsvWriter loss_csv(run.out_path(loss_name));
  loss_csv.header({"iteration", "loss"});
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
    loss_csv.row({static_cast<double>(i), result.loss_trace[i]});
  run.write_manifest();
  std::cout << "trained " << cfg.iterations << " iterations; final loss "
            << result.loss_trace.back() << "; weights -> "
            << run.out_path(weights_name).string() << "\n";
}

void cmd_generate(Run& run) {
  const Density p0 = run.density("p0");
  const std::unique_ptr<Deblender> deblender = run.make_deblender();
  const Schedule schedule = run.schedule();
  const VariantKind variant = run.variant();
  const Integrator integrator = run.integrator();
  const long count = run.count();
  const int d = p0.dim();

  Rng starts_rng = Rng(run.seed()).stream("generate-starts");
  std::vector<Vec> starts;
  if (count > 0) starts = sample(p0, count, starts_rng);

  std::vector<Trajectory> trajectories(starts.size());
  std::vector<std::string> errors(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    try {
      trajectories[i] = sample_deterministic(*deblender, starts[i], schedule, variant, integrator);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty())
      throw NumericalError("generate: start " + std::to_string(i) + ": " + errors[i]);

  CsvWriter endpoints(run.out_path("endpoints.csv"));
  std::vector<std::string> names;
  for (int k = 0; k < d; ++k) names.push_back("src_x" + std::to_string(k));
  for (int k = 0; k < d; ++k) names.push_back("end_x" + std::to_string(k));
  endpoints.header(names);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::vector<double> row;
    for (int k = 0; k < d; ++k) row.push_back(starts[i][k]);
    for (int k = 0; k < d; ++k) row.push_back(trajectories[i].endpoint()[k]);
    endpoints.row(row);
  }

  if (run.trajectories()) {
    for (std::size_t i = 0; i < trajectories.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "trajectory_%06zu.csv", i);
      CsvWriter tcsv(run.out_path(name));
      std::vector<std::string> tn{"step", "alpha"};
      for (int k = 0; k < d; ++k) tn.push_back("x" + std::to_string(k));
      tcsv.header(tn);
      for (std::size_t s = 0; s < trajectories[i].size(); ++s) {
        std::vector<double> row{static_cast<double>(s), trajectories[i].alphas[s]};
        for (int k = 0; k < d; ++k) row.push_back(trajectories[i].points[s][k]);
        tcsv.row(row);
      }
    }
  }
  run.write_manifest();
  std::cout << "generated " << starts.size() << " endpoints -> "
            << run.out_path("endpoints.csv").string() << "\n";
}

void cmd_converge(Run& run) {
  const GaussianMixture g0 = run.mixture("p0");
  const GaussianMixture g1 = run.mixture("p1");
  const long n_starts = run.resolved_long("converge", "starts", 256);
  const long chains = run.resolved_long("converge", "chains-per-start", 2);
  const auto ts_raw = parse_number_list(run.resolved("converge", "Ts", "8 64 512"));
  std::vector<int> Ts;
  for (double t : ts_raw) Ts.push_back(static_cast<int>(t));

  Rng starts_rng = Rng(run.seed()).stream("converge-starts");
  std::vector<Vec> starts;
  for (long i = 0; i < n_starts; ++i) starts.push_back(g0.sample(starts_rng));

  Rng study_rng = Rng(run.seed()).stream("converge-study");
  const ConvergenceReport report =
      convergence_study(g0, g1, starts, Ts, static_cast<int>(chains), study_rng);

  CsvWriter csv(run.out_path("convergence.csv"));
  csv.header({"T", "mean_endpoint_deviation"});
  for (const auto& r : report.records)
    csv.row({static_cast<double>(r.T), r.mean_endpoint_deviation});
  run.write_manifest();
  for (const auto& r : report.records)
    std::cout << "T=" << r.T << " mean endpoint deviation " << r.mean_endpoint_deviation << "\n";
}

void cmd_ddim_check(Run& run) {
  const long steps = run.resolved_long("ddim", "steps", 50);
  const double hi = run.resolved_double("ddim", "alpha-bar-hi", 0.999);
  const double lo = run.resolved_double("ddim", "alpha-bar-lo", 0.001);
  const long dim = run.resolved_long("ddim", "dim", 2);
  const std::string predictor = run.resolved("ddim", "predictor", "random");
  if (steps < 2) throw ConfigError("config: [ddim] steps must be >= 2");
  if (!(hi > lo) || !(hi <= 1.0) || !(lo > 0.0))
    throw ConfigError("config: [ddim] needs 0 < alpha-bar-lo < alpha-bar-hi <= 1");

  DdimSchedule schedule;
  for (long t = 0; t < steps; ++t)
    schedule.alphas_bar.push_back(
        hi * std::pow(lo / hi, static_cast<double>(t) / static_cast<double>(steps - 1)));

  Rng rng = Rng(run.seed()).stream("ddim-check");
  Vec x_start(dim);
  for (auto& v : x_start) v = rng.normal();

  EpsFn eps;
  if (predictor == "zero") {
    eps = [](const Vec& x, std::size_t) { return Vec(x.size(), 0.0); };
  } else if (predictor == "linear") {
    eps = [](const Vec& x, std::size_t) {
      Vec e(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) e[k] = 0.4 * x[k] - 0.1;
      return e;
    };
  } else if (predictor == "random") {
    // Frozen random affine map per step, derived from the run seed.
    const std::uint64_t base = derive_seed(run.seed(), "ddim-predictor");
    eps = [dim, base](const Vec& x, std::size_t t) {
      Rng r(derive_seed(base, "step", t));
      Vec e(x.size());
      for (std::size_t k = 0; k < x.size(); ++k) e[k] = r.normal() + r.uniform(-0.5, 0.5) * x[k];
      (void)dim;
      return e;
    };
  } else {
    throw ConfigError("config: [ddim] predictor must be zero|linear|random");
  }

  const EquivalenceReport report = equivalence_check(schedule, eps, x_start);
  CsvWriter csv(run.out_path("ddim_deviation.csv"));
  csv.header({"step", "max_abs_deviation"});
  for (std::size_t t = 0; t < report.per_step_deviation.size(); ++t)
    csv.row({static_cast<double>(t), report.per_step_deviation[t]});
  run.note("max-deviation", format_double(report.max_deviation));
  run.write_manifest();
  std::cout << (report.passed ? "PASS" : "FAIL") << " max deviation " << report.max_deviation
            << " (threshold 1e-9)\n";
  if (!report.passed)
    throw CheckFailure("ddim-check: deviation " + format_double(report.max_deviation) +
                       " exceeds 1e-9");
}

void cmd_warp(Run& run, const std::string& points_file) {
  const auto input = read_points_csv(points_file);
  const std::unique_ptr<Deblender> deblender = run.make_deblender();
  const WarpResult result =
      warp(input, *deblender, run.schedule(), run.variant(), run.integrator());
  write_points_csv(run.out_path("warped.csv"), result.points);
  run.note("input-points", points_file);
  run.write_manifest();
  if (!result.failures.empty()) {
    std::string msg = "warp: " + std::to_string(result.failures.size()) + " points failed:";
    for (const auto& f : result.failures)
      msg += " [" + std::to_string(f.index) + "] " + f.message + ";";
    throw NumericalError(msg);
  }
  std::cout << "warped " << input.size() << " points -> " << run.out_path("warped.csv").string()
            << "\n";
}

void cmd_eval(Run& run, const std::string& samples_a, const std::string& samples_b) {
  const auto a = read_points_csv(samples_a);
  const auto b = read_points_csv(samples_b);
  if (a.empty() || b.empty()) throw ConfigError("eval: sample files must be nonempty");
  if (a.front().size() != b.front().size())
    throw ConfigError("eval: sample files have different dimensions");
  const int d = static_cast<int>(a.front().size());

  double value = 0;
  std::string metric;
  if (d == 1) {
    metric = "w1";
    Rng rng = Rng(run.seed()).stream("eval-resample");
    value = wasserstein1_1d_resampled(coordinate(a, 0), coordinate(b, 0), rng);
    // Histogram dumps of both inputs over their common range.
    const int bins = static_cast<int>(run.resolved_long("eval", "hist-bins", 64));
    double lo = a[0][0], hi = a[0][0];
    for (const auto& v : a) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
    for (const auto& v : b) lo = std::min(lo, v[0]), hi = std::max(hi, v[0]);
    hi += 1e-9 * (1.0 + std::abs(hi));
    write_histogram_csv(Histogram1d::build(coordinate(a, 0), lo, hi, bins),
                        run.out_path("hist_a.csv"));
    write_histogram_csv(Histogram1d::build(coordinate(b, 0), lo, hi, bins),
                        run.out_path("hist_b.csv"));
  } else if (d == 2) {
    metric = "sliced_w";
    const long proj = run.resolved_long("eval", "projections", 256);
    Rng rng = Rng(run.seed()).stream("eval-projections");
    if (a.size() != b.size()) {
      // Equal sizes by uniform subsampling of the larger set.
      Rng sub = Rng(run.seed()).stream("eval-resample");
      auto shrink = [&](std::vector<Vec> v, std::size_t m) {
        for (std::size_t i = 0; i < m; ++i)
          std::swap(v[i], v[i + sub.uniform_index(v.size() - i)]);
        v.resize(m);
        return v;
      };
      const std::size_t m = std::min(a.size(), b.size());
      value = sliced_wasserstein(shrink(a, m), shrink(b, m), static_cast<int>(proj), rng);
    } else {
      value = sliced_wasserstein(a, b, static_cast<int>(proj), rng);
    }
  } else {
    throw ConfigError("eval: only 1D and 2D sample files are supported");
  }

  CsvWriter csv(run.out_path("metrics.csv"));
  csv.header({"metric", "value"});
  csv.raw_row(metric + "," + format_double(value));
  run.note("samples-a", samples_a);
  run.note("samples-b", samples_b);
  run.write_manifest();
  std::cout << metric << " = " << format_double(value) << "\n";
}

}  // namespace iadb::cli
