#include <doctest.h>

#include <chrono>
#include <thread>

#include "cloudifier/model/network.hpp"
#include "support.hpp"

using namespace cloudifier;
using namespace cloudifier::model;
using test::random_tensor;

namespace {

// Closed-form layer and parameter counts from the block list alone.
struct Budget {
  int layers = 0;
  std::size_t params = 0;
};

Budget budget_of(const NetworkConfig& cfg) {
  Budget b;
  int ch = cfg.input_channels, taps = 0;
  auto conv_bn = [&](std::size_t k, std::size_t in, std::size_t out) { b.params += k * k * in * out + 2 * out; };
  for (const auto& s : cfg.blocks) {
    const std::size_t in = static_cast<std::size_t>(ch), m = static_cast<std::size_t>(s.out_maps);
    switch (s.kind) {
      case BlockKind::Stem:
      case BlockKind::DownsampleConv:
        b.layers += 1;
        conv_bn(3, in, m);
        break;
      case BlockKind::IncRes: {
        b.layers += 7;
        b.params += in * m + m;              // stem with bias
        conv_bn(1, m, m / 2);                // A
        conv_bn(1, m, m / 2);                // B reduce
        conv_bn(3, m / 2, m / 2);            // B
        conv_bn(1, m, m / 4);                // C reduce
        conv_bn(5, m / 4, m / 4);            // C
        b.params += (m + m / 4) * m + m;     // bottleneck with bias
        break;
      }
      case BlockKind::DsRes:
        b.layers += in == m ? 2 : 3;
        b.params += 9 * in + in * m + m + 2 * m + (in == m ? 0 : in * m);
        break;
    }
    ch = s.out_maps;
    taps += s.tap ? 1 : 0;
  }
  // Branches: one transposed conv with bias per tap, kernel 2s (1 at s = 1).
  int stride = 1;
  ch = cfg.input_channels;
  for (const auto& s : cfg.blocks) {
    stride *= s.stride;
    ch = s.out_maps;
    if (!s.tap) continue;
    const std::size_t k = stride == 1 ? 1 : 2 * static_cast<std::size_t>(stride);
    b.params += k * k * static_cast<std::size_t>(ch) * cfg.branch_maps + cfg.branch_maps;
    b.layers += 1;
  }
  const std::size_t depth = static_cast<std::size_t>(cfg.branch_maps) * taps;
  b.params += depth * cfg.num_classes + cfg.num_classes;
  b.layers += 1;
  return b;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("micro variant builds and forwards") {
  Network net(micro(5), 1);
  CHECK(net.infer(random_tensor(Shape{1, 64, 64, 3}, 2, 0, 1)).shape() == Shape{1, 64, 64, 5});
  const Budget b = budget_of(net.config());
  CHECK(net.layer_count() == b.layers);
  CHECK(net.param_count() == b.params);
}

TEST_CASE("cloudifier109 budget") {
  const auto t0 = std::chrono::steady_clock::now();
  Network net(cloudifier109(), 3);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(seconds <= 10.0);
  CHECK(net.layer_count() == 109);
  CHECK(net.param_count() >= 1'000'000);
  CHECK(net.param_count() <= 1'400'000);
  const Budget b = budget_of(net.config());
  CHECK(net.layer_count() == b.layers);
  CHECK(net.param_count() == b.params);
  MESSAGE("cloudifier109: " << net.layer_count() << " layers, " << net.param_count() << " parameters");
}

TEST_CASE("cloudifier50 budget") {
  Network net(cloudifier50(), 4);
  CHECK(net.layer_count() == 50);
  const Budget b = budget_of(net.config());
  CHECK(net.layer_count() == b.layers);
  CHECK(net.param_count() == b.params);
  CHECK(net.param_count() < Network(cloudifier109(), 4).param_count());
}

TEST_CASE("budget assertions reject a mismatching build") {
  NetworkConfig cfg = micro(5);
  cfg.expected_layers = 99;
  CHECK_THROWS_WITH_AS(Network(cfg, 1), doctest::Contains("expected 99"), ConfigError);
  cfg = micro(5);
  cfg.min_params = 10'000'000;
  CHECK_THROWS_AS(Network(cfg, 1), ConfigError);
  cfg = micro(5);
  cfg.max_params = 10;
  CHECK_THROWS_AS(Network(cfg, 1), ConfigError);
}

TEST_CASE("same weights accept different input sizes") {
  Network net(cloudifier50(11), 5);
  CHECK(net.infer(random_tensor(Shape{2, 160, 224, 3}, 6, 0, 1)).shape() == Shape{2, 160, 224, 11});
  CHECK(net.infer(random_tensor(Shape{1, 48, 32, 3}, 7, 0, 1)).shape() == Shape{1, 48, 32, 11});
}

TEST_CASE("inference is deterministic and shareable across threads") {
  Network net(micro(5), 8);
  const Tensor x = random_tensor(Shape{1, 32, 48, 3}, 9, 0, 1);
  const Tensor a = net.infer(x);
  CHECK(test::bit_equal(a, net.infer(x)));
  Tensor t1, t2;
  std::thread th1([&] { t1 = net.infer(x); });
  std::thread th2([&] { t2 = net.infer(x); });
  th1.join();
  th2.join();
  CHECK(test::bit_equal(a, t1));
  CHECK(test::bit_equal(a, t2));
}

TEST_CASE("input checks name the required multiple") {
  Network net(micro(5), 10);
  CHECK(net.max_downsample() == 4);
  CHECK_THROWS_WITH_AS(net.check_input(Shape{1, 30, 32, 3}), doctest::Contains("4"), ShapeError);
  CHECK_THROWS_AS(net.check_input(Shape{1, 32, 32, 4}), ShapeError);
  CHECK_NOTHROW(net.check_input(Shape{1, 32, 36, 3}));
  CHECK(Network(cloudifier109(), 1).max_downsample() == 8);
}

TEST_CASE("running statistics are stored but not trained") {
  Network net(micro(5), 11);
  std::size_t stored = 0, trainable = 0;
  for (const auto& p : net.params()) {
    stored += p.var.value().size();
    if (p.trainable) trainable += p.var.value().size();
    const bool running = p.name.find("running_") != std::string::npos;
    CHECK(p.trainable == !running);
    CHECK(p.logical_rank == (p.var.shape().n == 1 && p.var.shape().h == 1 && p.var.shape().w == 1 &&
                                     p.name.find("kernel") == std::string::npos
                                 ? 1
                                 : 4));
  }
  CHECK(trainable == net.param_count());
  CHECK(stored > trainable);
  std::size_t from_list = 0;
  for (const auto& v : net.trainable()) from_list += v.value().size();
  CHECK(from_list == trainable);
}

TEST_CASE("train-mode forward updates running statistics; infer mode does not") {
  Network net(micro(5), 12);
  auto running = [&] {
    std::vector<real_t> v;
    for (const auto& p : net.params())
      if (!p.trainable) v.insert(v.end(), p.var.value().data().begin(), p.var.value().data().end());
    return v;
  };
  const auto before = running();
  const Tensor x = random_tensor(Shape{2, 16, 16, 3}, 13, 0, 1);
  net.infer(x);
  CHECK(running() == before);
  ag::Tape tape(ag::Tape::Mode::Inference);
  net.forward(tape, ag::Variable(x), ops::BnMode::Train);
  CHECK(running() != before);
}

TEST_CASE("descriptor round trip and validation") {
  for (const auto& cfg : {cloudifier109(), cloudifier50(24), micro(5)}) {
    const std::string text = cfg.descriptor();
    CHECK(NetworkConfig::parse_descriptor(text) == cfg);
    CHECK(NetworkConfig::parse_descriptor(text).descriptor() == text);
  }
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor("variant=x\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor("format=cfnet/9\n"), ConfigError);
  const std::string base = "format=cfnet/1\nnum_classes=3\nbranch_maps=2\n";
  CHECK_NOTHROW(NetworkConfig::parse_descriptor(base + "block=stem:4\nblock=dsres:4:tap\n"));
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=dsres:4:tap\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=stem:4\nblock=incres:6\nblock=dsres:6:tap\n"),
                  ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=stem:4\nblock=dsres:4\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=stem:4\nblock=down:4:tap\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=stem:4\nblock=pool:4\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "block=stem:x\n"), ConfigError);
  CHECK_THROWS_AS(NetworkConfig::parse_descriptor(base + "colour=red\n"), ConfigError);
  CHECK_THROWS_AS(variant_by_name("cloudifier7", 5), ConfigError);
}

}  // TEST_SUITE
