#include <doctest.h>

#include "cloudifier/model/blocks.hpp"
#include "support.hpp"

using namespace cloudifier;
using namespace cloudifier::model;
using test::random_tensor;

namespace {

struct Built {
  std::vector<ParamEntry> params;
  std::vector<LayerRecord> layers;
};

Built harvest(Builder& b) { return {b.take_params(), b.take_layers()}; }

void zero_trainable(const std::vector<ParamEntry>& params) {
  for (const auto& p : params) {
    if (p.trainable) p.var.mutable_value().fill(0);
  }
}

std::size_t trainable_count(const std::vector<ParamEntry>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.trainable ? p.var.value().size() : 0;
  return n;
}

Tensor run(Block& block, const Tensor& x, ops::BnMode mode = ops::BnMode::Train) {
  ag::Tape tape(ag::Tape::Mode::Inference);
  return block.forward(tape, ag::Variable(x), mode).value();
}

}  // namespace

TEST_SUITE("graph-blocks") {

TEST_CASE("inception residual block shape and layer count") {
  Builder b(1);
  IncResBlock block(b, "inc", 8, 8);
  const Built built = harvest(b);
  CHECK(run(block, random_tensor(Shape{1, 16, 16, 8}, 2)).shape() == Shape{1, 16, 16, 8});
  // stem, A, B reduce, B, C reduce, C, bottleneck
  CHECK(built.layers.size() == 7);
  CHECK(IncResBlock::kLayers == 7);
  const auto w = IncResBlock::column_widths(16);
  CHECK(w.a + w.b + w.c == 20);
  CHECK_THROWS_AS(IncResBlock::column_widths(10), ConfigError);
}

TEST_CASE("inception residual block with zero weights is the identity") {
  Builder b(3);
  IncResBlock block(b, "inc", 8, 8);
  const Built built = harvest(b);
  zero_trainable(built.params);
  const Tensor x = random_tensor(Shape{2, 6, 6, 8}, 4);
  CHECK(test::bit_equal(run(block, x), x));
  CHECK(test::bit_equal(run(block, x, ops::BnMode::Infer), x));
}

TEST_CASE("inception residual block widens through its stem") {
  Builder b(5);
  IncResBlock block(b, "inc", 6, 12);
  const Built built = harvest(b);
  CHECK(run(block, random_tensor(Shape{1, 5, 7, 6}, 6)).shape() == Shape{1, 5, 7, 12});
  // Closed form: stem 1x1 + bias, three columns with batch-norm, bottleneck + bias.
  const std::size_t in = 6, m = 12, a = 6, br = 6, bb = 6, cr = 3, c = 3;
  const std::size_t want = (in * m + m) + (m * a + 2 * a) + (m * br + 2 * br) + (9 * br * bb + 2 * bb) +
                           (m * cr + 2 * cr) + (25 * cr * c + 2 * c) + ((a + bb + c) * m + m);
  CHECK(trainable_count(built.params) == want);
}

TEST_CASE("depthwise separable residual block") {
  SUBCASE("zero weights give the identity") {
    Builder b(7);
    DsResBlock block(b, "ds", 16, 16);
    const Built built = harvest(b);
    zero_trainable(built.params);
    const Tensor x = random_tensor(Shape{1, 12, 12, 16}, 8);
    CHECK(test::bit_equal(run(block, x), x));
    CHECK(built.layers.size() == 2);
    CHECK_FALSE(block.has_projection());
  }
  SUBCASE("projection changes width") {
    Builder b(9);
    DsResBlock block(b, "ds", 16, 32);
    const Built built = harvest(b);
    CHECK(run(block, random_tensor(Shape{1, 12, 12, 16}, 10)).shape() == Shape{1, 12, 12, 32});
    CHECK(built.layers.size() == 3);
    CHECK(block.has_projection());
  }
  SUBCASE("parameter count closed form") {
    for (auto [in, out] : {std::pair{16, 32}, std::pair{8, 8}, std::pair{24, 12}, std::pair{3, 5}}) {
      Builder b(11);
      DsResBlock block(b, "ds", in, out);
      const Built built = harvest(b);
      const std::size_t want = static_cast<std::size_t>(9 * in + in * out + out + (in != out ? in * out : 0) + 2 * out);
      CHECK(trainable_count(built.params) == want);
    }
  }
}

TEST_CASE("upsample branch restores input resolution") {
  struct Case { Shape tap; int scale; };
  for (const Case c : {Case{{1, 44, 44, 64}, 8}, Case{{1, 5, 5, 4}, 4}, Case{{2, 7, 3, 5}, 1}, Case{{1, 6, 4, 3}, 2}}) {
    Builder b(12);
    UpsampleBranch branch(b, "up", c.scale, c.tap.c, 6);
    const Built built = harvest(b);
    ag::Tape tape(ag::Tape::Mode::Inference);
    const Tensor y = branch.forward(tape, ag::Variable(random_tensor(c.tap, 13))).value();
    CHECK(y.shape() == Shape{c.tap.n, c.tap.h * c.scale, c.tap.w * c.scale, 6});
    const int k = c.scale == 1 ? 1 : 2 * c.scale;
    CHECK(built.params.front().var.shape() == Shape{k, k, 6, c.tap.c});
  }
  Builder b(14);
  CHECK_THROWS_AS(UpsampleBranch(b, "up", 3, 4, 6), ConfigError);
}

TEST_CASE("readout examples") {
  SUBCASE("identity weights pass the branch through") {
    Builder b(15);
    Readout readout(b, "readout", 4, 4);
    const Built built = harvest(b);
    Tensor& w = built.params[0].var.mutable_value();
    w.fill(0);
    for (int k = 0; k < 4; ++k) w(0, 0, k, k) = 1;
    built.params[1].var.mutable_value().fill(0);
    const ag::Variable branch(random_tensor(Shape{1, 3, 5, 4}, 16));
    ag::Tape tape(ag::Tape::Mode::Inference);
    CHECK(test::bit_equal(readout.forward(tape, std::span(&branch, 1)).value(), branch.value()));
  }
  SUBCASE("weight shape follows the concatenated depth") {
    Builder b(17);
    Readout readout(b, "readout", 3 + 5, 10);
    CHECK(readout.weight_shape() == std::pair{8, 10});
    const ag::Variable branches[] = {ag::Variable(random_tensor(Shape{2, 4, 4, 3}, 18)),
                                     ag::Variable(random_tensor(Shape{2, 4, 4, 5}, 19))};
    ag::Tape tape(ag::Tape::Mode::Inference);
    CHECK(readout.forward(tape, branches).value().shape() == Shape{2, 4, 4, 10});
  }
  SUBCASE("per-fiber application equals a loop over positions") {
    Builder b(20);
    Readout readout(b, "readout", 8, 5);
    const Built built = harvest(b);
    const Tensor& w = built.params[0].var.value();
    const Tensor& bias = built.params[1].var.value();
    const ag::Variable branches[] = {ag::Variable(random_tensor(Shape{2, 3, 4, 3}, 21)),
                                     ag::Variable(random_tensor(Shape{2, 3, 4, 5}, 22))};
    ag::Tape tape(ag::Tape::Mode::Inference);
    const Tensor logits = readout.forward(tape, branches).value();
    for (int n = 0; n < 2; ++n)
      for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
          // The same matrix applied to this fiber alone.
          Tensor fiber(Shape{1, 1, 1, 8});
          for (int d = 0; d < 3; ++d) fiber[static_cast<std::size_t>(d)] = branches[0].value()(n, y, x, d);
          for (int d = 0; d < 5; ++d) fiber[static_cast<std::size_t>(3 + d)] = branches[1].value()(n, y, x, d);
          const ag::Variable single(fiber);
          ag::Tape t2(ag::Tape::Mode::Inference);
          const Tensor one = readout.forward(t2, std::span(&single, 1)).value();
          for (int k = 0; k < 5; ++k) {
            CHECK(logits(n, y, x, k) == one[static_cast<std::size_t>(k)]);
            double acc = bias[static_cast<std::size_t>(k)];
            for (int d = 0; d < 8; ++d) acc += double(fiber[static_cast<std::size_t>(d)]) * w(0, 0, d, k);
            CHECK(std::abs(logits(n, y, x, k) - acc) <= 1e-6);
          }
        }
  }
}

}  // TEST_SUITE
