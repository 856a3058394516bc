#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "iadb/densities.hpp"
#include "iadb/oracle.hpp"
#include "iadb/vec.hpp"

namespace iadb {

enum class Activation { relu, gelu };
enum class LossKind { l2, l1 };

/// Fully-connected network. Input is the point concatenated with the raw
/// blend parameter (d + 1 values), output has dimension d; hidden layers use
/// the tagged activation, the output layer is linear. Double precision
/// throughout.
struct Mlp {
  std::vector<int> layer_sizes;                 // [in, hidden..., out]
  std::vector<std::vector<double>> weights;     // per layer, row-major out x in
  std::vector<std::vector<double>> biases;      // per layer, length out
  Activation activation = Activation::gelu;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  int layer_count() const { return static_cast<int>(layer_sizes.size()) - 1; }
  std::size_t parameter_count() const;
  double parameter_norm() const;
  void validate() const;
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
Mlp make_mlp(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed);

/// The experiment architecture: [d+1, width x hidden_layers, d].
Mlp make_deblender_mlp(int point_dim, int hidden_layers, int width, Activation activation,
                       std::uint64_t seed);

/// Applies the network to a raw input vector.
Vec mlp_apply(const Mlp& net, const Vec& input);

/// Deblender-style evaluation: input is x concatenated with alpha.
Vec mlp_forward(const Mlp& net, const Vec& x, double alpha);

struct TrainSample {
  Vec x0;
  Vec x1;
  double alpha = 0.0;
};

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const Mlp& net);
  void accumulate(const Gradients& other);
  void scale_by(double s);
};

/// Mean loss over the batch and exact reverse-mode gradients into `grads`.
/// l2 sums squared coordinate errors per sample; l1 sums absolute errors.
/// The reduction over the batch runs in fixed block order, so results do not
/// depend on the thread count.
double loss_and_grads(const Mlp& net, std::span<const TrainSample> batch, LossKind kind,
                      Gradients& grads);

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon_adam = 1e-8;
  long iterations = 10000;
  int batch_size = 256;
  LossKind loss = LossKind::l2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
  long step = 0;

  static AdamState zeros_like(const Mlp& net);
};

void adam_update(Mlp& net, AdamState& state, const Gradients& grads, const TrainConfig& cfg);

struct TrainResult {
  Mlp net;
  std::vector<double> loss_trace;  // one entry per iteration
};

/// Trains the deblending objective: each step draws fresh i.i.d.
/// (x0, x1, alpha) per batch element, forms x_alpha, and regresses the
/// difference x1 - x0. Fully deterministic given cfg.seed. Throws
/// std::runtime_error with the iteration index and parameter norms if the
/// loss turns non-finite.
TrainResult train(Mlp net, const Density& p0, const Density& p1, const TrainConfig& cfg);

/// Weight file: magic "IADB-MLP\0", version byte, activation byte,
/// layer-size table, then little-endian 64-bit floats in layer order,
/// row-major, biases after each layer's weights. Round-trips bit-exactly.
void save_weights(const Mlp& net, const std::filesystem::path& path);
Mlp load_weights(const std::filesystem::path& path);

/// Deblender backed by a trained difference predictor (the stats are
/// recovered from the predicted difference via the consistency identity).
class NeuralDeblender final : public Deblender {
 public:
  explicit NeuralDeblender(Mlp net);

  DeblendStats stats(const Vec& x, double alpha) const override;
  int dim() const override { return net_.output_dim(); }
  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
};

}  // namespace iadb
