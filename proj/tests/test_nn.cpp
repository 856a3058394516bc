#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "iadb/nn.hpp"
#include "iadb/oracle.hpp"
#include "test_helpers.hpp"

using namespace iadb;
using namespace iadb::testing;

namespace {

Mlp zero_net(std::vector<int> sizes, Activation act = Activation::gelu) {
  Mlp net = make_mlp(std::move(sizes), act, 0);
  for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
  return net;
}

double grad_rel_err(const Mlp& net0, std::span<const TrainSample> batch, LossKind kind) {
  Gradients g;
  loss_and_grads(net0, batch, kind, g);
  double worst = 0;
  const double h = 1e-5;
  Mlp net = net0;
  auto probe = [&](std::vector<double>& param, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double keep = param[i];
      param[i] = keep + h;
      Gradients scratch;
      const double up = loss_and_grads(net, batch, kind, scratch);
      param[i] = keep - h;
      const double dn = loss_and_grads(net, batch, kind, scratch);
      param[i] = keep;
      const double fd = (up - dn) / (2.0 * h);
      const double rel = std::abs(fd - grad[i]) / std::max(1e-6, std::abs(fd) + std::abs(grad[i]));
      worst = std::max(worst, rel);
    }
  };
  for (int l = 0; l < net.layer_count(); ++l) {
    probe(net.weights[l], g.weights[l]);
    probe(net.biases[l], g.biases[l]);
  }
  return worst;
}

std::vector<TrainSample> random_batch(int d, int n, Rng& rng) {
  std::vector<TrainSample> batch(n);
  for (auto& s : batch) {
    s.x0.resize(d);
    s.x1.resize(d);
    for (int k = 0; k < d; ++k) {
      s.x0[k] = rng.normal();
      s.x1[k] = rng.normal() + 1.0;
    }
    s.alpha = rng.uniform();
  }
  return batch;
}

}  // namespace

TEST_CASE("zero network maps everything to zero") {
  const Mlp net = zero_net({3, 8, 2});
  const Vec out = mlp_forward(net, {1.0, -2.0}, 0.7);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
}

TEST_CASE("a single linear layer is the expected affine map") {
  Mlp net = zero_net({3, 2});
  // Identity-extended weights: row r picks input r, plus a bias.
  net.weights[0] = {1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  net.biases[0] = {0.5, -0.25};
  const Vec out = mlp_forward(net, {1.0, 2.0}, 0.5);
  CHECK(out[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(1.75).epsilon(1e-15));
}

TEST_CASE("losses on the zero network match hand arithmetic") {
  const Mlp net = zero_net({2, 1});
  const std::vector<TrainSample> batch{{{1.0}, {3.0}, 0.2}};
  Gradients g;
  CHECK(loss_and_grads(net, batch, LossKind::l2, g) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(loss_and_grads(net, batch, LossKind::l1, g) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS(loss_and_grads(net, {}, LossKind::l2, g));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(515);
  for (int c = 0; c < 4; ++c) {
    const Activation act = c == 2 ? Activation::relu : Activation::gelu;
    const LossKind kind = c == 3 ? LossKind::l1 : LossKind::l2;
    const Mlp net = make_mlp({3, 8, 8, 2}, act, derive_seed(515, "gradcheck-net", c));
    const auto batch = random_batch(2, 6, rng);
    CHECK(grad_rel_err(net, batch, kind) < 1e-4);
  }
}

TEST_CASE("training is deterministic and rejects bad configs") {
  TrainConfig cfg;
  cfg.iterations = 30;
  cfg.batch_size = 16;
  cfg.learning_rate = 1e-3;
  cfg.seed = 77;
  const Density p0(normal1d(0, 1)), p1(normal1d(2, 0.5));
  const Mlp init = make_deblender_mlp(1, 2, 16, Activation::gelu, 9);
  const TrainResult a = train(init, p0, p1, cfg);
  const TrainResult b = train(init, p0, p1, cfg);
  CHECK(a.loss_trace == b.loss_trace);
  for (int l = 0; l < a.net.layer_count(); ++l) {
    CHECK(a.net.weights[l] == b.net.weights[l]);
    CHECK(a.net.biases[l] == b.net.biases[l]);
  }
  CHECK(a.loss_trace.size() == 30);

  TrainConfig bad = cfg;
  bad.iterations = 0;
  CHECK_THROWS(train(init, p0, p1, bad));
}

TEST_CASE("weight files round trip bit-exactly and reject corruption") {
  const auto dir = std::filesystem::temp_directory_path() / "iadb_nn_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "net.bin";

  const Mlp net = make_mlp({3, 5, 2}, Activation::relu, 42);
  save_weights(net, path);
  const Mlp back = load_weights(path);
  CHECK(back.layer_sizes == net.layer_sizes);
  CHECK(back.activation == net.activation);
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK(back.weights[l] == net.weights[l]);
    CHECK(back.biases[l] == net.biases[l]);
  }

  // Truncation is detected with a byte offset.
  std::vector<char> bytes;
  {
    std::ifstream in(path, std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto trunc = dir / "trunc.bin";
  {
    std::ofstream out(trunc, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_WITH_AS(load_weights(trunc), doctest::Contains("byte"), std::runtime_error);

  // A corrupted layer table fails validation.
  const auto badsize = dir / "badsize.bin";
  {
    std::vector<char> mutated = bytes;
    mutated[11] = 9;  // first layer-size byte (magic 9 + version 1 + act 1)
    std::ofstream out(badsize, std::ios::binary);
    out.write(mutated.data(), static_cast<std::streamsize>(mutated.size()));
  }
  CHECK_THROWS(load_weights(badsize));

  const auto nomagic = dir / "nomagic.bin";
  {
    std::vector<char> mutated = bytes;
    mutated[0] = 'X';
    std::ofstream out(nomagic, std::ios::binary);
    out.write(mutated.data(), static_cast<std::streamsize>(mutated.size()));
  }
  CHECK_THROWS_WITH_AS(load_weights(nomagic), doctest::Contains("magic"), std::runtime_error);
}

TEST_CASE("l2 training tracks the mean and l1 training tracks the median") {
  // Asymmetric posterior: p0 standard normal, p1 a lopsided two-mode
  // mixture, so the posterior mean and median separate.
  const GaussianMixture g0 = normal1d(0, 1);
  const GaussianMixture g1(1, {{0.8, {0.0}, {0.3}}, {0.2, {2.0}, {0.3}}});
  const Density p0(g0), p1(g1);

  TrainConfig cfg;
  cfg.iterations = 4000;
  cfg.batch_size = 128;
  cfg.learning_rate = 2e-3;
  cfg.seed = 31337;
  const Mlp init = make_deblender_mlp(1, 3, 32, Activation::gelu, 5);
  cfg.loss = LossKind::l2;
  const Mlp net_l2 = train(init, p0, p1, cfg).net;
  cfg.loss = LossKind::l1;
  const Mlp net_l1 = train(init, p0, p1, cfg).net;

  double l2_to_mean = 0, l1_to_mean = 0, l2_to_med = 0, l1_to_med = 0;
  int count = 0;
  for (double alpha : {0.25, 0.5, 0.75}) {
    for (double x = -1.0; x <= 2.0; x += 0.25) {
      const double mean = analytic_posterior_stats(g0, g1, {x}, alpha).diff[0];
      const double med = posterior_diff_median(g0, g1, x, alpha);
      const double o2 = mlp_forward(net_l2, {x}, alpha)[0];
      const double o1 = mlp_forward(net_l1, {x}, alpha)[0];
      l2_to_mean += (o2 - mean) * (o2 - mean);
      l1_to_mean += (o1 - mean) * (o1 - mean);
      l2_to_med += (o2 - med) * (o2 - med);
      l1_to_med += (o1 - med) * (o1 - med);
      ++count;
    }
  }
  l2_to_mean = std::sqrt(l2_to_mean / count);
  l1_to_mean = std::sqrt(l1_to_mean / count);
  l2_to_med = std::sqrt(l2_to_med / count);
  l1_to_med = std::sqrt(l1_to_med / count);
  CHECK(l2_to_mean < l1_to_mean);
  CHECK(l1_to_med < l2_to_med);
}

TEST_CASE("the neural deblender recovers stats from its predicted difference") {
  const Mlp net = make_deblender_mlp(2, 2, 8, Activation::gelu, 3);
  const NeuralDeblender deb(net);
  const Vec x{0.4, -0.2};
  const auto s = deb.stats(x, 0.3);
  const Vec direct = mlp_forward(net, x, 0.3);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(s.xbar0[k] - (x[k] - 0.3 * direct[k])) < 1e-15);
    CHECK(std::abs((1.0 - 0.3) * s.xbar0[k] + 0.3 * s.xbar1[k] - x[k]) < 1e-12);
  }
}
