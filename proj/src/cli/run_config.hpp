#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "iadb/config.hpp"
#include "iadb/densities.hpp"
#include "iadb/nn.hpp"
#include "iadb/oracle.hpp"
#include "iadb/samplers.hpp"

namespace iadb::cli {

/// Non-finite values, Monte-Carlo failures and other numerical breakdowns
/// (exit code 2).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A check ran to completion and failed (exit code 3).
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flag overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> steps;
  std::optional<std::string> variant;
  std::optional<std::string> schedule;
  std::optional<std::string> integrator;
  std::optional<long> count;
  bool trajectories = false;
};

VariantKind parse_variant(const std::string& s);
Integrator parse_integrator(const std::string& s);

/// One command invocation: the parsed config with flag overrides folded in.
/// Accessors resolve defaults and write the resolved value back, so the
/// manifest echoes the full effective configuration.
class Run {
 public:
  Run(Config cfg, const Overrides& overrides, std::string command);

  std::uint64_t seed() const { return seed_; }
  const std::filesystem::path& out_dir() const { return out_; }
  Config& config() { return cfg_; }

  /// Resolve-or-default accessors (record the effective value).
  std::string resolved(const std::string& section, const std::string& key,
                       const std::string& fallback);
  double resolved_double(const std::string& section, const std::string& key, double fallback);
  long resolved_long(const std::string& section, const std::string& key, long fallback);

  /// Builds the density described by [section]; throws ConfigError with the
  /// section name when it is missing or malformed.
  Density density(const std::string& section);
  /// Same, then requires a mixture representation.
  GaussianMixture mixture(const std::string& section);

  TrainConfig train_config();
  Mlp initial_net(int point_dim);

  Schedule schedule();
  VariantKind variant();
  Integrator integrator();
  long count();
  bool trajectories() const { return trajectories_; }

  /// The deblender selected by [sample] deblender = analytic|neural|mc|median.
  std::unique_ptr<Deblender> make_deblender();

  /// Resolves a file path from the config: absolute paths pass through,
  /// relative ones live in the output directory.
  std::filesystem::path out_path(const std::string& name) const;

  /// Extra facts recorded in the manifest's [run] section.
  void note(const std::string& key, const std::string& value);
  void write_manifest();

 private:
  Config cfg_;
  std::string command_;
  std::uint64_t seed_;
  std::filesystem::path out_;
  bool trajectories_ = false;
};

}  // namespace iadb::cli
