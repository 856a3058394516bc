#include <CLI11.hpp>
#include <iostream>

#include "../src/cli/commands.hpp"

using namespace iadb;
using namespace iadb::cli;

namespace {

struct Args {
  std::string config;
  Overrides overrides;
  std::string warp_points;
  std::string eval_a, eval_b;
  std::string figure_which;
};

int dispatch(const std::string& command, Args& args) {
  Config cfg;
  if (!args.config.empty()) cfg = Config::parse_file(args.config);
  Run run(std::move(cfg), args.overrides, command);
  if (command == "train")
    cmd_train(run);
  else if (command == "generate")
    cmd_generate(run);
  else if (command == "converge")
    cmd_converge(run);
  else if (command == "ddim-check")
    cmd_ddim_check(run);
  else if (command == "warp")
    cmd_warp(run, args.warp_points);
  else if (command == "eval")
    cmd_eval(run, args.eval_a, args.eval_b);
  else if (command == "figure")
    cmd_figure(run, args.figure_which);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iadb: iterative alpha-(de)blending samplers, training and experiments"};
  app.require_subcommand(1);

  Args args;
  std::uint64_t seed = 0;
  std::string out, variant, schedule, integrator;
  int steps = 0;
  long count = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "run configuration file");
    sub->add_option("--seed", seed, "root seed (overrides config)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--steps", steps, "schedule steps T (overrides config)");
    sub->add_option("--variant", variant, "update variant: a|b|c|d");
    sub->add_option("--schedule", schedule, "schedule kind: uniform|cosine");
    sub->add_option("--integrator", integrator, "integrator: euler|rk2");
    return sub;
  };

  auto* train = add_common(app.add_subcommand("train", "train a neural deblender"));
  auto* generate = add_common(app.add_subcommand("generate", "map p0 samples to endpoints"));
  generate->add_option("--count", count, "number of starts");
  generate->add_flag("--trajectories", args.overrides.trajectories,
                     "write one trajectory CSV per start");
  auto* converge = add_common(app.add_subcommand("converge", "stochastic vs deterministic study"));
  auto* ddim = add_common(app.add_subcommand("ddim-check", "certify the DDIM equivalence"));
  auto* warp = add_common(app.add_subcommand("warp", "warp a point-set file"));
  warp->add_option("points", args.warp_points, "input point-set CSV")->required();
  auto* eval = add_common(app.add_subcommand("eval", "distance between two sample files"));
  eval->add_option("samples_a", args.eval_a, "first sample CSV")->required();
  eval->add_option("samples_b", args.eval_b, "second sample CSV")->required();
  auto* figure = add_common(app.add_subcommand("figure", "reproduce an experiment figure"));
  figure->add_option("which", args.figure_which, "fig4|fig5|fig6|fig8|fig9|fig10")->required();
  figure->add_option("--count", count, "sample count for the figure");

  CLI11_PARSE(app, argc, argv);

  const auto given = [](CLI::App* sub, const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  for (CLI::App* sub : {train, generate, converge, ddim, warp, eval, figure}) {
    if (!sub->parsed()) continue;
    if (given(sub, "--seed")) args.overrides.seed = seed;
    if (given(sub, "--out")) args.overrides.out = out;
    if (given(sub, "--steps")) args.overrides.steps = steps;
    if (given(sub, "--variant")) args.overrides.variant = variant;
    if (given(sub, "--schedule")) args.overrides.schedule = schedule;
    if (given(sub, "--integrator")) args.overrides.integrator = integrator;
    if (given(sub, "--count")) args.overrides.count = count;
    try {
      return dispatch(sub->get_name(), args);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const CheckFailure& e) {
      std::cerr << "check failed: " << e.what() << "\n";
      return 3;
    } catch (const NumericalError& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure: " << e.what() << "\n";
      return 2;
    }
  }
  return 1;
}
