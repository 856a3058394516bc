#include "iadb/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "iadb/parallel.hpp"
#include "iadb/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "weight files are little-endian; byte swapping is not implemented");

namespace iadb {

namespace {

double act_value(Activation a, double z) {
  if (a == Activation::relu) return z > 0 ? z : 0.0;
  // gelu(z) = z * Phi(z), exact form
  return 0.5 * z * (1.0 + std::erf(z / std::numbers::sqrt2));
}

double act_deriv(Activation a, double z) {
  if (a == Activation::relu) return z > 0 ? 1.0 : 0.0;
  const double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return 0.5 * (1.0 + std::erf(z / std::numbers::sqrt2)) + z * phi;
}

/// Forward pass keeping pre-activations; backward pass accumulating exact
/// parameter gradients for one sample.
struct Workspace {
  std::vector<Vec> a;  // activations, a[0] = input
  std::vector<Vec> z;  // pre-activations per layer
  Vec delta, delta_prev;

  void forward(const Mlp& net, const Vec& input) {
    const int L = net.layer_count();
    a.resize(L + 1);
    z.resize(L);
    a[0] = input;
    for (int l = 0; l < L; ++l) {
      const int nin = net.layer_sizes[l];
      const int nout = net.layer_sizes[l + 1];
      const double* W = net.weights[l].data();
      z[l].resize(nout);
      a[l + 1].resize(nout);
      for (int r = 0; r < nout; ++r) {
        double s = net.biases[l][r];
        const double* row = W + static_cast<std::size_t>(r) * nin;
        for (int c = 0; c < nin; ++c) s += row[c] * a[l][c];
        z[l][r] = s;
        a[l + 1][r] = (l == L - 1) ? s : act_value(net.activation, s);
      }
    }
  }

  /// dLdout = gradient of the per-sample loss w.r.t. the network output.
  void backward(const Mlp& net, const Vec& dLdout, Gradients& grads) {
    const int L = net.layer_count();
    delta = dLdout;
    for (int l = L - 1; l >= 0; --l) {
      const int nin = net.layer_sizes[l];
      const int nout = net.layer_sizes[l + 1];
      if (l != L - 1)
        for (int r = 0; r < nout; ++r) delta[r] *= act_deriv(net.activation, z[l][r]);
      double* gW = grads.weights[l].data();
      for (int r = 0; r < nout; ++r) {
        const double dr = delta[r];
        grads.biases[l][r] += dr;
        double* row = gW + static_cast<std::size_t>(r) * nin;
        for (int c = 0; c < nin; ++c) row[c] += dr * a[l][c];
      }
      if (l > 0) {
        delta_prev.assign(nin, 0.0);
        const double* W = net.weights[l].data();
        for (int r = 0; r < nout; ++r) {
          const double dr = delta[r];
          const double* row = W + static_cast<std::size_t>(r) * nin;
          for (int c = 0; c < nin; ++c) delta_prev[c] += dr * row[c];
        }
        std::swap(delta, delta_prev);
      }
    }
  }
};

}  // namespace

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < layer_count(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

double Mlp::parameter_norm() const {
  double s = 0;
  for (int l = 0; l < layer_count(); ++l) {
    for (double w : weights[l]) s += w * w;
    for (double b : biases[l]) s += b * b;
  }
  return std::sqrt(s);
}

void Mlp::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("Mlp: needs at least one layer");
  for (int s : layer_sizes)
    if (s < 1) throw std::invalid_argument("Mlp: layer sizes must be >= 1");
  const int L = layer_count();
  if (static_cast<int>(weights.size()) != L || static_cast<int>(biases.size()) != L)
    throw std::invalid_argument("Mlp: layer table does not match parameter arrays");
  for (int l = 0; l < L; ++l) {
    const std::size_t nin = layer_sizes[l], nout = layer_sizes[l + 1];
    if (weights[l].size() != nin * nout || biases[l].size() != nout)
      throw std::invalid_argument("Mlp: parameter shape mismatch at layer " + std::to_string(l));
    for (double w : weights[l])
      if (!std::isfinite(w)) throw std::invalid_argument("Mlp: non-finite weight");
    for (double b : biases[l])
      if (!std::isfinite(b)) throw std::invalid_argument("Mlp: non-finite bias");
  }
}

Mlp make_mlp(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed) {
  Mlp net;
  net.layer_sizes = std::move(layer_sizes);
  net.activation = activation;
  if (net.layer_sizes.size() < 2) throw std::invalid_argument("make_mlp: needs at least one layer");
  Rng rng(derive_seed(seed, "mlp-init"));
  for (int l = 0; l < net.layer_count(); ++l) {
    const int nin = net.layer_sizes[l], nout = net.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (nin + nout));
    std::vector<double> w(static_cast<std::size_t>(nin) * nout);
    for (auto& v : w) v = rng.uniform(-limit, limit);
    net.weights.push_back(std::move(w));
    net.biases.emplace_back(nout, 0.0);
  }
  net.validate();
  return net;
}

Mlp make_deblender_mlp(int point_dim, int hidden_layers, int width, Activation activation,
                       std::uint64_t seed) {
  std::vector<int> sizes;
  sizes.push_back(point_dim + 1);
  for (int i = 0; i < hidden_layers; ++i) sizes.push_back(width);
  sizes.push_back(point_dim);
  return make_mlp(std::move(sizes), activation, seed);
}

Vec mlp_apply(const Mlp& net, const Vec& input) {
  check_dim(input, static_cast<std::size_t>(net.input_dim()), "mlp_apply");
  Workspace ws;
  ws.forward(net, input);
  return ws.a.back();
}

Vec mlp_forward(const Mlp& net, const Vec& x, double alpha) {
  if (static_cast<int>(x.size()) + 1 != net.input_dim())
    throw std::invalid_argument("mlp_forward: point dimension does not match the network");
  Vec input(x);
  input.push_back(alpha);
  return mlp_apply(net, input);
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  for (int l = 0; l < net.layer_count(); ++l) {
    g.weights.emplace_back(net.weights[l].size(), 0.0);
    g.biases.emplace_back(net.biases[l].size(), 0.0);
  }
  return g;
}

void Gradients::accumulate(const Gradients& other) {
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += other.weights[l][i];
    for (std::size_t i = 0; i < biases[l].size(); ++i) biases[l][i] += other.biases[l][i];
  }
}

void Gradients::scale_by(double s) {
  for (auto& w : weights)
    for (auto& v : w) v *= s;
  for (auto& b : biases)
    for (auto& v : b) v *= s;
}

double loss_and_grads(const Mlp& net, std::span<const TrainSample> batch, LossKind kind,
                      Gradients& grads) {
  if (batch.empty()) throw std::invalid_argument("loss_and_grads: empty batch");
  const int d = net.output_dim();

  struct Acc {
    double loss = 0;
    Gradients g;
  };
  Acc total;
  total.g = Gradients::zeros_like(net);
  blocked_reduce(
      batch.size(), total,
      [&] {
        Acc a;
        a.g = Gradients::zeros_like(net);
        return a;
      },
      [&](Acc& acc, std::size_t i) {
        const TrainSample& s = batch[i];
        Vec input(s.x0.size() + 1);
        for (std::size_t k = 0; k < s.x0.size(); ++k)
          input[k] = (1.0 - s.alpha) * s.x0[k] + s.alpha * s.x1[k];
        input[s.x0.size()] = s.alpha;
        Workspace ws;
        ws.forward(net, input);
        const Vec& pred = ws.a.back();
        Vec dLdout(d);
        for (int k = 0; k < d; ++k) {
          const double r = pred[k] - (s.x1[k] - s.x0[k]);
          if (kind == LossKind::l2) {
            acc.loss += r * r;
            dLdout[k] = 2.0 * r;
          } else {
            acc.loss += std::abs(r);
            dLdout[k] = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
          }
        }
        ws.backward(net, dLdout, acc.g);
      },
      [&](Acc& t, const Acc& a) {
        t.loss += a.loss;
        t.g.accumulate(a.g);
      });

  const double inv = 1.0 / static_cast<double>(batch.size());
  total.g.scale_by(inv);
  grads = std::move(total.g);
  return total.loss * inv;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1))
    throw std::invalid_argument("TrainConfig: betas must be in (0,1)");
  if (!(epsilon_adam > 0)) throw std::invalid_argument("TrainConfig: epsilon_adam must be > 0");
  if (iterations < 1) throw std::invalid_argument("TrainConfig: iterations must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

AdamState AdamState::zeros_like(const Mlp& net) {
  AdamState s;
  for (int l = 0; l < net.layer_count(); ++l) {
    s.m_w.emplace_back(net.weights[l].size(), 0.0);
    s.v_w.emplace_back(net.weights[l].size(), 0.0);
    s.m_b.emplace_back(net.biases[l].size(), 0.0);
    s.v_b.emplace_back(net.biases[l].size(), 0.0);
  }
  return s;
}

void adam_update(Mlp& net, AdamState& state, const Gradients& grads, const TrainConfig& cfg) {
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
  auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                    const std::vector<double>& g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      p[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon_adam);
    }
  };
  for (int l = 0; l < net.layer_count(); ++l) {
    update(net.weights[l], state.m_w[l], state.v_w[l], grads.weights[l]);
    update(net.biases[l], state.m_b[l], state.v_b[l], grads.biases[l]);
  }
}

TrainResult train(Mlp net, const Density& p0, const Density& p1, const TrainConfig& cfg) {
  cfg.validate();
  net.validate();
  const int d = p0.dim();
  if (p1.dim() != d) throw std::invalid_argument("train: density dimension mismatch");
  if (net.input_dim() != d + 1 || net.output_dim() != d)
    throw std::invalid_argument("train: network shape does not match density dimension");

  Rng data_rng(derive_seed(cfg.seed, "train-data"));
  AdamState adam = AdamState::zeros_like(net);
  Gradients grads = Gradients::zeros_like(net);
  TrainResult result;
  result.loss_trace.reserve(cfg.iterations);

  std::vector<TrainSample> batch(cfg.batch_size);
  for (long it = 0; it < cfg.iterations; ++it) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      batch[b].x0 = sample(p0, 1, data_rng).front();
      batch[b].x1 = sample(p1, 1, data_rng).front();
      batch[b].alpha = data_rng.uniform();
    }
    const double loss = loss_and_grads(net, batch, cfg.loss, grads);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "train: non-finite loss at iteration " << it
          << " (parameter norm " << net.parameter_norm() << ")";
      throw std::runtime_error(msg.str());
    }
    adam_update(net, adam, grads, cfg);
    result.loss_trace.push_back(loss);
  }
  result.net = std::move(net);
  return result;
}

// ---------------------------------------------------------------------------
// Weight files

namespace {

constexpr char kMagic[9] = {'I', 'A', 'D', 'B', '-', 'M', 'L', 'P', '\0'};
constexpr std::uint8_t kVersion = 1;

struct Reader {
  const std::vector<char>& buf;
  std::size_t pos = 0;

  void read(void* dst, std::size_t n, const char* what) {
    if (pos + n > buf.size())
      throw std::runtime_error("load_weights: truncated file reading " + std::string(what) +
                               " at byte " + std::to_string(pos));
    std::memcpy(dst, buf.data() + pos, n);
    pos += n;
  }
};

}  // namespace

void save_weights(const Mlp& net, const std::filesystem::path& path) {
  net.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_weights: cannot open " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.put(static_cast<char>(kVersion));
  out.put(net.activation == Activation::relu ? 0 : 1);
  const std::uint32_t n_sizes = static_cast<std::uint32_t>(net.layer_sizes.size());
  out.write(reinterpret_cast<const char*>(&n_sizes), sizeof(n_sizes));
  for (int s : net.layer_sizes) {
    const std::uint32_t v = static_cast<std::uint32_t>(s);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    out.write(reinterpret_cast<const char*>(net.weights[l].data()),
              static_cast<std::streamsize>(net.weights[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(net.biases[l].data()),
              static_cast<std::streamsize>(net.biases[l].size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("save_weights: write failed for " + path.string());
}

Mlp load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_weights: cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{buf};

  char magic[sizeof(kMagic)];
  r.read(magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("load_weights: bad magic at byte 0");
  std::uint8_t version = 0, act = 0;
  r.read(&version, 1, "version");
  if (version != kVersion)
    throw std::runtime_error("load_weights: unsupported version " + std::to_string(version) +
                             " at byte " + std::to_string(r.pos - 1));
  r.read(&act, 1, "activation");
  if (act > 1)
    throw std::runtime_error("load_weights: unknown activation tag at byte " +
                             std::to_string(r.pos - 1));
  std::uint32_t n_sizes = 0;
  r.read(&n_sizes, sizeof(n_sizes), "layer table length");
  if (n_sizes < 2 || n_sizes > 1024)
    throw std::runtime_error("load_weights: invalid layer table length at byte " +
                             std::to_string(r.pos - sizeof(n_sizes)));
  Mlp net;
  net.activation = act == 0 ? Activation::relu : Activation::gelu;
  net.layer_sizes.resize(n_sizes);
  for (auto& s : net.layer_sizes) {
    std::uint32_t v = 0;
    r.read(&v, sizeof(v), "layer size");
    if (v < 1 || v > (1u << 20))
      throw std::runtime_error("load_weights: invalid layer size at byte " +
                               std::to_string(r.pos - sizeof(v)));
    s = static_cast<int>(v);
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    const std::size_t nin = net.layer_sizes[l], nout = net.layer_sizes[l + 1];
    std::vector<double> w(nin * nout);
    r.read(w.data(), w.size() * sizeof(double), "weights");
    std::vector<double> b(nout);
    r.read(b.data(), b.size() * sizeof(double), "biases");
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  if (r.pos != buf.size())
    throw std::runtime_error("load_weights: trailing bytes at byte " + std::to_string(r.pos));
  net.validate();
  return net;
}

NeuralDeblender::NeuralDeblender(Mlp net) : net_(std::move(net)) {
  net_.validate();
  if (net_.input_dim() != net_.output_dim() + 1)
    throw std::invalid_argument("NeuralDeblender: network must map (d+1) -> d");
}

DeblendStats NeuralDeblender::stats(const Vec& x, double alpha) const {
  return DeblendStats::from_diff(x, alpha, mlp_forward(net_, x, alpha));
}

}  // namespace iadb
