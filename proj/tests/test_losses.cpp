#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cloudifier/ops/ops.hpp"
#include "support.hpp"

using namespace cloudifier;
using test::random_tensor;

namespace {

Tensor random_probs(Shape s, std::uint64_t seed) {
  return ops::softmax_per_fiber(random_tensor(s, seed, -3.0, 3.0));
}

ops::LabelMap random_labels(const Shape& s, std::uint64_t seed) {
  Rng rng(seed);
  ops::LabelMap m{s.n, s.h, s.w, {}};
  for (std::size_t i = 0; i < s.pixels(); ++i) m.labels.push_back(static_cast<std::uint16_t>(rng.uniform_int(0, s.c - 1)));
  return m;
}

// Per-pixel loop: -alpha_y (1 - p_y)^gamma log max(p_y, floor), averaged.
double loop_oracle(const Tensor& probs, const ops::LabelMap& labels, double gamma, const std::vector<double>& w) {
  const Shape s = probs.shape();
  double total = 0.0;
  for (int n = 0; n < s.n; ++n)
    for (int y = 0; y < s.h; ++y)
      for (int x = 0; x < s.w; ++x) {
        const int k = labels(n, y, x);
        const double p = probs(n, y, x, k);
        const double alpha = w.empty() ? 1.0 : w[static_cast<std::size_t>(k)];
        total += -alpha * std::pow(1.0 - p, gamma) * std::log(std::max(p, 1e-12));
      }
  return total / static_cast<double>(s.pixels());
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("softmax examples") {
  const Tensor u = ops::softmax_per_fiber(Tensor(Shape{1, 2, 2, 4}, real_t(0.7)));
  for (auto v : u.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-7));
  const Tensor two = ops::softmax_per_fiber(Tensor(Shape{1, 1, 1, 2}, std::vector<real_t>{0, real_t(std::log(3.0))}));
  CHECK(two[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(two[1] == doctest::Approx(0.75).epsilon(1e-6));
  // Logits on a 1/256 grid stay exact after the shift in 32-bit floats.
  Tensor z = random_tensor(Shape{2, 3, 3, 5}, 1, -4, 4);
  for (auto& v : z.data()) v = static_cast<real_t>(std::round(v * 256) / 256);
  Tensor shifted = z;
  for (auto& v : shifted.data()) v += 1000;
  CHECK(test::max_abs_diff(ops::softmax_per_fiber(z), ops::softmax_per_fiber(shifted)) <= 1e-6);
  const Tensor p = ops::softmax_per_fiber(z);
  for (std::size_t f = 0; f < p.size(); f += 5) {
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += p[f + static_cast<std::size_t>(k)];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("nll closed forms") {
  const Shape s{2, 3, 3, 10};
  const auto labels = random_labels(s, 2);
  Tensor onehot(s);
  for (std::size_t i = 0; i < s.pixels(); ++i) onehot[i * 10 + labels.labels[i]] = 1;
  CHECK(ops::dense_nll_loss(onehot, labels) == 0.0);
  const Tensor uniform(s, real_t(0.1));
  CHECK(std::abs(ops::dense_nll_loss(uniform, labels) - std::log(10.0)) <= 1e-5);
  for (int c : {2, 5, 11, 24}) {
    const Shape sc{1, 4, 4, c};
    CHECK(std::abs(ops::dense_nll_loss(Tensor(sc, real_t(1.0 / c)), random_labels(sc, c)) - std::log(c)) <= 1e-5);
  }
}

TEST_CASE("nll matches the per-pixel loop oracle") {
  const Shape s{2, 3, 3, 4};
  const Tensor p = random_probs(s, 3);
  const auto labels = random_labels(s, 4);
  CHECK(std::abs(ops::dense_nll_loss(p, labels) - loop_oracle(p, labels, 0.0, {})) <= 1e-6);
  // Zero probability is clamped at the floor, never infinite.
  Tensor z(Shape{1, 1, 1, 2}, std::vector<real_t>{0, 1});
  const ops::LabelMap l{1, 1, 1, {0}};
  CHECK(ops::dense_nll_loss(z, l) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("focal reduces to nll at gamma zero") {
  for (std::uint64_t seed = 10; seed < 15; ++seed) {
    const Shape s{2, 4, 3, 5};
    const Tensor p = random_probs(s, seed);
    const auto labels = random_labels(s, seed + 100);
    CHECK(std::abs(ops::focal_dense_loss(p, labels, 0.0) - ops::dense_nll_loss(p, labels)) <= 1e-6);
    const std::vector<double> ones(5, 1.0);
    CHECK(std::abs(ops::focal_dense_loss(p, labels, 0.0, ones) - ops::dense_nll_loss(p, labels)) <= 1e-6);
    // Gradients agree too.
    CHECK(test::max_abs_diff(ops::dense_loss_grad(p, labels, 0.0), ops::dense_loss_grad(p, labels, 0.0, ones)) <= 1e-6);
  }
}

TEST_CASE("focal closed form and loop oracle") {
  Tensor p(Shape{1, 1, 1, 2}, std::vector<real_t>{real_t(0.1), real_t(0.9)});
  const ops::LabelMap l{1, 1, 1, {1}};
  CHECK(ops::focal_dense_loss(p, l, 2.0) == doctest::Approx(0.01 * -std::log(0.9)).epsilon(1e-5));
  CHECK(ops::focal_dense_loss(p, l, 2.0) == doctest::Approx(0.0010536).epsilon(1e-3));
  const Shape s{2, 3, 4, 3};
  const Tensor q = random_probs(s, 20);
  const auto labels = random_labels(s, 21);
  const std::vector<double> w{0.25, 1.0, 2.0};
  for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(std::abs(ops::focal_dense_loss(q, labels, gamma, w) - loop_oracle(q, labels, gamma, w)) <= 1e-6);
  }
}

TEST_CASE("modulating factor is monotone in the true-class probability") {
  for (double gamma : {0.5, 1.0, 2.0, 5.0}) {
    CAPTURE(gamma);
    CHECK(ops::focal_modulation(1.0, gamma) == 0.0);
    CHECK(ops::focal_modulation(0.0, gamma) == 1.0);
    double prev = 2.0;
    for (int i = 0; i <= 100; ++i) {
      const double m = ops::focal_modulation(i / 100.0, gamma);
      CHECK(m <= 1.0);
      CHECK(m >= 0.0);
      CHECK(m < prev);
      prev = m;
    }
  }
  // For a fixed p, larger gamma down-weights more.
  for (double p : {0.1, 0.5, 0.9}) {
    CHECK(ops::focal_modulation(p, 5.0) < ops::focal_modulation(p, 2.0));
    CHECK(ops::focal_modulation(p, 2.0) < ops::focal_modulation(p, 0.5));
  }
}

TEST_CASE("focal shifts weight away from well-classified pixels") {
  // 90 pixels with p_true = 0.99, 10 with p_true = 0.2.
  const int n = 100;
  Tensor p(Shape{1, 1, n, 2});
  ops::LabelMap labels{1, 1, n, std::vector<std::uint16_t>(n, 1)};
  for (int i = 0; i < n; ++i) {
    const double pt = i < 90 ? 0.99 : 0.2;
    p(0, 0, i, 1) = static_cast<real_t>(pt);
    p(0, 0, i, 0) = static_cast<real_t>(1.0 - pt);
  }
  auto easy_share = [&](double gamma) {
    double easy = 0.0, all = 0.0;
    for (int i = 0; i < n; ++i) {
      Tensor one(Shape{1, 1, 1, 2}, std::vector<real_t>{p(0, 0, i, 0), p(0, 0, i, 1)});
      const double term = ops::focal_dense_loss(one, ops::LabelMap{1, 1, 1, {1}}, gamma);
      all += term;
      easy += i < 90 ? term : 0.0;
    }
    CHECK(all / n == doctest::Approx(ops::focal_dense_loss(p, labels, gamma)).epsilon(1e-6));
    return easy / all;
  };
  CHECK(easy_share(2.0) < easy_share(0.0));
}

TEST_CASE("loss input validation") {
  const Tensor p(Shape{1, 2, 2, 3}, real_t(1.0 / 3));
  ops::LabelMap bad{1, 2, 2, {0, 1, 2, 3}};
  CHECK_THROWS_AS(ops::dense_nll_loss(p, bad), ConfigError);
  ops::LabelMap short_map{1, 2, 1, {0, 1}};
  CHECK_THROWS_AS(ops::dense_nll_loss(p, short_map), ShapeError);
  ops::LabelMap ok{1, 2, 2, {0, 1, 2, 0}};
  CHECK_THROWS(ops::focal_dense_loss(p, ok, -1.0));
  const std::vector<double> wrong_len{1.0, 1.0};
  CHECK_THROWS(ops::focal_dense_loss(p, ok, 1.0, wrong_len));
}

}  // TEST_SUITE
