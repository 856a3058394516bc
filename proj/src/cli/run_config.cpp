#include "run_config.hpp"

#include <cmath>

#include "iadb/csv.hpp"
#include "iadb/rng.hpp"

namespace iadb::cli {

VariantKind parse_variant(const std::string& s) {
  if (s == "a") return VariantKind::A;
  if (s == "b") return VariantKind::B;
  if (s == "c") return VariantKind::C;
  if (s == "d") return VariantKind::D;
  throw ConfigError("unknown variant '" + s + "' (expected a|b|c|d)");
}

Integrator parse_integrator(const std::string& s) {
  if (s == "euler") return Integrator::euler;
  if (s == "rk2") return Integrator::rk2;
  throw ConfigError("unknown integrator '" + s + "' (expected euler|rk2)");
}

Run::Run(Config cfg, const Overrides& overrides, std::string command)
    : cfg_(std::move(cfg)), command_(std::move(command)) {
  if (overrides.seed) cfg_.set("", "seed", std::to_string(*overrides.seed));
  if (overrides.out) cfg_.set("", "out", *overrides.out);
  if (overrides.steps) cfg_.set("sample", "steps", std::to_string(*overrides.steps));
  if (overrides.variant) cfg_.set("sample", "variant", *overrides.variant);
  if (overrides.schedule) cfg_.set("sample", "schedule", *overrides.schedule);
  if (overrides.integrator) cfg_.set("sample", "integrator", *overrides.integrator);
  if (overrides.count) cfg_.set("sample", "count", std::to_string(*overrides.count));
  if (overrides.trajectories) cfg_.set("sample", "trajectories", "1");
  trajectories_ = cfg_.get_or("sample", "trajectories", "0") != "0";

  seed_ = cfg_.get_u64_or("", "seed", 0);
  cfg_.set("", "seed", std::to_string(seed_));
  out_ = cfg_.get_or("", "out", "runs/" + command_);
  cfg_.set("", "out", out_.string());
  std::filesystem::create_directories(out_);
  cfg_.set("run", "command", command_);
}

std::string Run::resolved(const std::string& section, const std::string& key,
                          const std::string& fallback) {
  const std::string v = cfg_.get_or(section, key, fallback);
  cfg_.set(section, key, v);
  return v;
}

double Run::resolved_double(const std::string& section, const std::string& key, double fallback) {
  if (!cfg_.has(section, key)) cfg_.set_double(section, key, fallback);
  return cfg_.get_double(section, key);
}

long Run::resolved_long(const std::string& section, const std::string& key, long fallback) {
  if (!cfg_.has(section, key)) cfg_.set(section, key, std::to_string(fallback));
  return cfg_.get_long(section, key);
}

Density Run::density(const std::string& section) {
  if (!cfg_.has_section(section))
    throw ConfigError("config: missing density section [" + section + "]");
  const std::string type = cfg_.get(section, "type");
  if (type == "gmm") {
    const int dim = static_cast<int>(cfg_.get_long(section, "dim"));
    const auto rows = cfg_.get_all(section, "component");
    if (rows.empty())
      throw ConfigError("config: [" + section + "] needs at least one 'component' line");
    std::vector<GaussianComponent> comps;
    for (const auto& row : rows) {
      const auto nums = parse_number_list(row);
      if (static_cast<int>(nums.size()) != 1 + 2 * dim)
        throw ConfigError("config: [" + section + "] component needs 1 + 2*dim numbers");
      GaussianComponent c;
      c.weight = nums[0];
      c.mean.assign(nums.begin() + 1, nums.begin() + 1 + dim);
      c.stddev.assign(nums.begin() + 1 + dim, nums.end());
      comps.push_back(std::move(c));
    }
    return Density(GaussianMixture(dim, std::move(comps)));
  }
  if (type == "uniform-rect") {
    return Density(UniformRegion(Rect{parse_number_list(cfg_.get(section, "min")),
                                      parse_number_list(cfg_.get(section, "max"))}));
  }
  if (type == "uniform-disk") {
    return Density(UniformRegion(Disk{parse_number_list(cfg_.get(section, "center")),
                                      cfg_.get_double(section, "radius")}));
  }
  if (type == "point-cloud") {
    const auto pts = read_points_csv(cfg_.get(section, "file"));
    return Density(PointCloudDensity(pts, cfg_.get_double(section, "bandwidth")));
  }
  if (type == "scurve" || type == "swiss-roll") {
    const long n = resolved_long(section, "count", 1000);
    const double noise = resolved_double(section, "noise", 0.05);
    const double bw = resolved_double(section, "bandwidth", std::max(noise, 1e-3));
    const std::uint64_t js = derive_seed(seed_, "density-" + section);
    return type == "scurve" ? Density(make_scurve(n, noise, js, bw))
                            : Density(make_swiss_roll(n, noise, js, bw));
  }
  throw ConfigError("config: [" + section + "] has unknown density type '" + type + "'");
}

GaussianMixture Run::mixture(const std::string& section) {
  auto g = as_gaussian_mixture(density(section));
  if (!g)
    throw ConfigError("config: [" + section +
                      "] must be mixture-representable for this command (gmm, point-cloud, "
                      "scurve or swiss-roll)");
  return *std::move(g);
}

TrainConfig Run::train_config() {
  TrainConfig cfg;
  cfg.learning_rate = resolved_double("train", "learning-rate", 1e-5);
  cfg.beta1 = resolved_double("train", "beta1", 0.9);
  cfg.beta2 = resolved_double("train", "beta2", 0.999);
  cfg.epsilon_adam = resolved_double("train", "epsilon", 1e-8);
  cfg.iterations = resolved_long("train", "iterations", 10000);
  cfg.batch_size = static_cast<int>(resolved_long("train", "batch", 256));
  const std::string loss = resolved("train", "loss", "l2");
  if (loss == "l2")
    cfg.loss = LossKind::l2;
  else if (loss == "l1")
    cfg.loss = LossKind::l1;
  else
    throw ConfigError("config: [train] loss must be l2 or l1");
  cfg.seed = derive_seed(seed_, "train-" + loss);
  cfg.validate();
  return cfg;
}

Mlp Run::initial_net(int point_dim) {
  const int hidden = static_cast<int>(resolved_long("train", "hidden-layers", 5));
  const int width = static_cast<int>(resolved_long("train", "width", 64));
  const std::string act = resolved("train", "activation", "gelu");
  Activation activation;
  if (act == "gelu")
    activation = Activation::gelu;
  else if (act == "relu")
    activation = Activation::relu;
  else
    throw ConfigError("config: [train] activation must be gelu or relu");
  return make_deblender_mlp(point_dim, hidden, width, activation, derive_seed(seed_, "mlp-init"));
}

Schedule Run::schedule() {
  const std::string kind = resolved("sample", "schedule", "uniform");
  const int T = static_cast<int>(resolved_long("sample", "steps", 128));
  if (T < 1) throw ConfigError("config: [sample] steps must be >= 1");
  if (kind == "uniform") return Schedule::uniform(T);
  if (kind == "cosine") return Schedule::cosine(T);
  throw ConfigError("config: [sample] schedule must be uniform or cosine");
}

VariantKind Run::variant() { return parse_variant(resolved("sample", "variant", "d")); }

Integrator Run::integrator() { return parse_integrator(resolved("sample", "integrator", "euler")); }

long Run::count() {
  const long n = resolved_long("sample", "count", 10000);
  if (n < 0) throw ConfigError("config: [sample] count must be >= 0");
  return n;
}

std::unique_ptr<Deblender> Run::make_deblender() {
  const std::string kind = resolved("sample", "deblender", "analytic");
  if (kind == "analytic") {
    AnalyticOracleOptions opts;
    opts.exact = resolved("sample", "exact-pairs", "0") != "0";
    opts.subsample_seed = derive_seed(seed_, "oracle-subsample");
    auto deb = std::make_unique<AnalyticGmmDeblender>(mixture("p0"), mixture("p1"), opts);
    note("oracle-subsampled", deb->subsampled() ? "1" : "0");
    return deb;
  }
  if (kind == "median") return std::make_unique<MedianDeblender1d>(mixture("p0"), mixture("p1"));
  if (kind == "mc") {
    const long n = resolved_long("sample", "mc-samples", 10000);
    return std::make_unique<MonteCarloDeblender>(density("p0"), density("p1"), n,
                                                 Rng(derive_seed(seed_, "mc-deblender")));
  }
  if (kind == "neural") {
    const std::string file = cfg_.get_or("sample", "weights", "");
    if (file.empty())
      throw ConfigError("config: [sample] weights is required for the neural deblender");
    const auto path = out_path(file);
    if (!std::filesystem::exists(path))
      throw ConfigError("missing weight file " + path.string() +
                        "; produce it with: iadb train --config <config> --out " + out_.string());
    return std::make_unique<NeuralDeblender>(load_weights(path));
  }
  throw ConfigError("config: [sample] deblender must be analytic|neural|mc|median");
}

std::filesystem::path Run::out_path(const std::string& name) const {
  const std::filesystem::path p(name);
  return p.is_absolute() ? p : out_ / p;
}

void Run::note(const std::string& key, const std::string& value) { cfg_.set("run", key, value); }

void Run::write_manifest() { cfg_.save(out_ / "manifest.ini"); }

}  // namespace iadb::cli
