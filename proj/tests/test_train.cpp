#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "cloudifier/common.hpp"
#include "cloudifier/train/split.hpp"
#include "cloudifier/train/train_loop.hpp"
#include "support.hpp"

using namespace cloudifier;
using namespace cloudifier::train;

namespace {

std::vector<scene::Observation> sketch_scenes(int count, std::uint64_t seed) {
  scene::GeneratorConfig cfg;
  cfg.count = count;
  cfg.size = 64;
  cfg.theme = scene::ThemeKind::Sketch;
  cfg.coarse_limit = 5;
  cfg.seed = seed;
  return scene::generate_meta_batch(cfg).observations;
}

std::vector<Tensor> snapshot(const model::Network& net) {
  std::vector<Tensor> out;
  for (const auto& v : net.trainable()) out.push_back(v.value());
  return out;
}


// Oracle: the bias-corrected update written out in double.
double adam_oracle_on_square(double lr, int steps) {
  double x = 5, m = 0, v = 0;
  for (int t = 1; t <= steps; ++t) {
    const double g = 2 * x;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    x -= lr * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  return x;
}

double adam_on_square(double lr, int steps) {
  ag::Variable p(Tensor(Shape::vec(1), real_t{5}), true);
  AdamConfig cfg;
  cfg.lr = lr;
  Adam adam({p}, cfg);
  for (int t = 0; t < steps; ++t) {
    adam.step(std::vector<Tensor>{Tensor(Shape::vec(1), static_cast<real_t>(2 * double(p.value()[0])))});
  }
  return p.value()[0];
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("split sizes") {
  const SplitIndices s = split_indices(1000, SplitSpec{});
  CHECK(s.train.size() == 930);
  CHECK(s.test.size() == 40);
  CHECK(s.dev.size() == 30);
  const SplitIndices h = split_indices(100, SplitSpec{});
  CHECK(h.train.size() == 93);
  CHECK(h.test.size() == 4);
  CHECK(h.dev.size() == 3);
  CHECK_THROWS_AS(split_indices(0, SplitSpec{}), ConfigError);
}

TEST_CASE("split is a deterministic partition") {
  for (std::size_t n : {1u, 7u, 101u, 357u, 3072u}) {
    CAPTURE(n);
    SplitSpec spec;
    spec.seed = 5;
    const SplitIndices a = split_indices(n, spec), b = split_indices(n, spec);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.dev == b.dev);
    std::vector<std::size_t> all;
    all.insert(all.end(), a.train.begin(), a.train.end());
    all.insert(all.end(), a.test.begin(), a.test.end());
    all.insert(all.end(), a.dev.begin(), a.dev.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(n);
    std::iota(expect.begin(), expect.end(), std::size_t{0});
    CHECK(all == expect);
    CHECK(std::abs(double(a.train.size()) - 0.93 * n) <= 1.0);
    CHECK(std::abs(double(a.test.size()) - 0.04 * n) <= 1.0);
    CHECK(std::abs(double(a.dev.size()) - 0.03 * n) <= 1.0);
  }
  SplitSpec other;
  other.seed = 6;
  CHECK(split_indices(1000, other).test != split_indices(1000, SplitSpec{}).test);
  const std::vector<int> items{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto parts = split_dataset(items, SplitSpec{});
  CHECK(parts.train.size() + parts.test.size() + parts.dev.size() == 10);
}

TEST_CASE("adam: zero gradient is a fixed point") {
  ag::Variable p(Tensor(Shape::vec(3), std::vector<real_t>{1, -2, 3}), true, "p");
  const Tensor before = p.value();
  Adam adam({p});
  const std::vector<Tensor> zeros{Tensor(Shape::vec(3))};
  for (int i = 0; i < 5; ++i) adam.step(zeros);
  CHECK(test::bit_equal(p.value(), before));
  CHECK(adam.steps() == 5);
  CHECK(adam.first_moment(0)[1] == 0.0f);

  // After one real step the moments decay geometrically under zero gradients.
  Adam moving({p});
  moving.step(std::vector<Tensor>{Tensor(Shape::vec(3), real_t{1})});
  const double m0 = moving.first_moment(0)[0], v0 = moving.second_moment(0)[0];
  moving.step(zeros);
  CHECK(moving.first_moment(0)[0] == doctest::Approx(0.9 * m0));
  CHECK(moving.second_moment(0)[0] == doctest::Approx(0.999 * v0));
}

TEST_CASE("adam: first step moves by the learning rate") {
  ag::Variable p(Tensor(Shape::vec(1), real_t{0.5}), true);
  Adam adam({p});
  adam.step(std::vector<Tensor>{Tensor(Shape::vec(1), real_t{1})});
  CHECK(double(p.value()[0]) == doctest::Approx(0.5 - 0.01 / (1 + 1e-8)).epsilon(1e-6));
  CHECK(adam.steps() == 1);
}

TEST_CASE("adam: steps on x^2 match the update rule") {
  // Each Adam step moves by about lr, so at 0.01 two hundred steps travel
  // roughly 2 units; 0.1 is the rate that reaches the origin from 5.
  for (double lr : {0.01, 0.1}) {
    CAPTURE(lr);
    CHECK(adam_on_square(lr, 200) == doctest::Approx(adam_oracle_on_square(lr, 200)).epsilon(1e-4).scale(1e-3));
  }
  CHECK(std::abs(adam_on_square(0.01, 200) - 5) <= 2.0 + 1e-6);
  CHECK(std::abs(adam_on_square(0.1, 200)) < 0.5);
}

TEST_CASE("adam: non-finite gradients are rejected without side effects") {
  ag::Variable a(Tensor(Shape::vec(2), real_t{1}), true), b(Tensor(Shape::vec(2), real_t{2}), true);
  Adam adam({a, b});
  std::vector<Tensor> grads{Tensor(Shape::vec(2), real_t{1}), Tensor(Shape::vec(2), real_t{1})};
  grads[1][1] = std::numeric_limits<real_t>::quiet_NaN();
  CHECK_THROWS_AS(adam.step(grads), NumericError);
  CHECK(adam.steps() == 0);
  CHECK(a.value()[0] == 1.0f);
  CHECK(adam.first_moment(0)[0] == 0.0f);
  grads[1][1] = std::numeric_limits<real_t>::infinity();
  CHECK_THROWS_AS(adam.step(grads), NumericError);
  CHECK_THROWS_AS(adam.set_learning_rate(-1), ConfigError);
}

TEST_CASE("plateau: improving losses keep the rate") {
  PlateauSchedule s(0.01);
  for (int e = 0; e < 20; ++e) CHECK(s.observe(1.0 - 0.01 * e) == 0.01);
}

TEST_CASE("plateau: flat losses halve the rate after the patience runs out") {
  PlateauSchedule s(0.01);
  CHECK(s.observe(1.0) == 0.01);   // epoch 1 sets the best
  CHECK(s.observe(1.0) == 0.01);   // 2: stale 1
  CHECK(s.observe(1.0) == 0.01);   // 3: stale 2
  CHECK(s.observe(1.0) == 0.005);  // 4: stale 3, decay
  CHECK(s.observe(1.0) == 0.005);
  CHECK(s.observe(1.0) == 0.005);
  CHECK(s.observe(1.0) == 0.0025);
  // The floor holds however long the plateau lasts.
  for (int i = 0; i < 200; ++i) s.observe(1.0);
  CHECK(s.lr() == doctest::Approx(1e-5));
}

TEST_CASE("plateau: sub-threshold improvements still decay") {
  PlateauConfig cfg;
  cfg.min_delta = 0.01;
  PlateauSchedule s(0.01, cfg);
  // Hand trace: 0.99 improves on 1.0 by exactly min_delta; every later step
  // improves by less, so decays follow at epochs 5 and 8.
  const double losses[] = {1.0, 0.99, 0.989, 0.9889, 0.98889, 0.988889, 0.9888889, 0.98888889};
  const double expect[] = {0.01, 0.01, 0.01, 0.01, 0.005, 0.005, 0.005, 0.0025};
  for (int e = 0; e < 8; ++e) {
    CAPTURE(e);
    CHECK(s.observe(losses[e]) == doctest::Approx(expect[e]));
  }
  CHECK(s.best() == doctest::Approx(0.99));
}

TEST_CASE("train_loop: zero learning rate leaves weights unchanged") {
  const auto data = sketch_scenes(4, 1);
  model::Network net(model::micro(5), 3);
  const auto before = snapshot(net);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.lr = 0;
  cfg.batch_size = 2;
  cfg.allow_any_batch_size = true;
  const History h = train_loop(net, data, {}, cfg);
  REQUIRE(h.epochs.size() == 1);
  CHECK(std::isfinite(h.epochs[0].train_loss));
  CHECK(std::isnan(h.epochs[0].dev_loss));
  CHECK(h.epochs[0].lr == 0.0);
  const auto after = snapshot(net);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(test::bit_equal(before[i], after[i]));
}

TEST_CASE("train_loop: configuration errors") {
  const auto data = sketch_scenes(2, 2);
  model::Network net(model::micro(5), 3);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  CHECK_THROWS_AS(train_loop(net, data, {}, cfg), ConfigError);
  cfg.batch_size = 129;
  CHECK_THROWS_AS(train_loop(net, data, {}, cfg), ConfigError);
  cfg.batch_size = 32;
  CHECK_THROWS_AS(train_loop(net, {}, {}, cfg), ConfigError);
  CHECK(parse_loss_kind("focal") == LossKind::Focal);
  CHECK_THROWS_AS(parse_loss_kind("hinge"), ConfigError);
}

TEST_CASE("train_loop: diverging weights abort with a diagnostic") {
  const auto data = sketch_scenes(2, 3);
  model::Network net(model::micro(5), 3);
  const auto ro = net.readout().dense().kernel;
  for (auto& v : ro.mutable_value().data()) v = std::numeric_limits<real_t>::infinity();
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 2;
  cfg.allow_any_batch_size = true;
  try {
    train_loop(net, data, {}, cfg);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("batch 1") != std::string::npos);
  }
}

TEST_CASE("train_loop: micro training loss decreases over the first epochs") {
  int decreasing = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto data = sketch_scenes(32, 1000 + seed);
    model::Network net(model::micro(5), seed);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 32;
    cfg.seed = seed;
    const History h = train_loop(net, data, {}, cfg);
    bool ok = true;
    for (std::size_t e = 1; e < h.epochs.size(); ++e) ok = ok && h.epochs[e].train_loss < h.epochs[e - 1].train_loss;
    decreasing += ok ? 1 : 0;
    MESSAGE("seed " << seed << ": " << h.epochs.front().train_loss << " -> " << h.epochs.back().train_loss);
  }
  CHECK(decreasing >= 9);
}

TEST_CASE("train_loop: dev loss and history CSV") {
  const auto data = sketch_scenes(6, 4);
  const std::vector<scene::Observation> train_part(data.begin(), data.begin() + 4), dev(data.begin() + 4, data.end());
  model::Network net(model::micro(5), 1);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 2;
  cfg.allow_any_batch_size = true;
  int callbacks = 0;
  const History h = train_loop(net, train_part, dev, cfg, [&](const EpochRecord&) { ++callbacks; });
  CHECK(callbacks == 2);
  REQUIRE(h.epochs.size() == 2);
  CHECK(h.epochs[1].epoch == 2);
  CHECK(std::isfinite(h.epochs[0].dev_loss));
  // Recorded dev loss equals a fresh inference-mode evaluation after the run.
  CHECK(h.epochs[1].dev_loss == doctest::Approx(dataset_loss(net, dev, LossKind::Nll, 2.0, {}, 2)).epsilon(1e-9));

  const std::string csv = h.to_csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,train_loss,dev_loss,lr");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(rows == 2);
  const auto path = std::filesystem::temp_directory_path() / "cloudifier_history_test.csv";
  h.write_csv(path.string());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == csv);
  std::filesystem::remove(path);
}

TEST_CASE("loss is normalised per pixel") {
  const auto data = sketch_scenes(4, 5);
  model::Network net(model::micro(5), 2);
  const std::vector<scene::Observation> twice{data[0], data[0], data[1], data[1]};
  const std::vector<scene::Observation> once{data[0], data[1]};
  CHECK(dataset_loss(net, twice, LossKind::Nll, 0, {}, 4) ==
        doctest::Approx(dataset_loss(net, once, LossKind::Nll, 0, {}, 2)).epsilon(1e-5));
}

}  // TEST_SUITE
