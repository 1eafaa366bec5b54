#pragma once

#include <string>

#include "cloudifier/model/layers.hpp"

namespace cloudifier::model {

class Block {
 public:
  virtual ~Block() = default;
  virtual ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) = 0;
  virtual int out_channels() const = 0;
};

// Inception-residual block.
//
//   x -> stem 1x1 (linear) -+-> A: 1x1                      -+
//                           +-> B: 1x1 -> 3x3               -+-> concat -> 1x1 bottleneck (linear) -> (+) skip
//                           +-> C: 1x1 -> 5x5               -+
//
// Column convs are conv -> batch-norm -> ReLU. The skip is x itself when the
// channel counts match, otherwise the stem output, which then doubles as the
// linear projection. No nonlinearity sits on the skip path.
class IncResBlock final : public Block {
 public:
  IncResBlock(Builder& b, const std::string& name, int in_channels, int out_maps);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) override;
  int out_channels() const override { return out_maps_; }

  struct Widths {
    int a, b_reduce, b, c_reduce, c;
  };
  static Widths column_widths(int out_maps);
  static constexpr int kLayers = 7;

 private:
  int in_channels_;
  int out_maps_;
  ConvLayer stem_;
  ConvBnRelu col_a_;
  ConvBnRelu col_b_reduce_, col_b_;
  ConvBnRelu col_c_reduce_, col_c_;
  ConvLayer bottleneck_;
};

// Depthwise-separable residual block: depthwise 3x3 -> pointwise 1x1 ->
// batch-norm -> ReLU, added to the input (through a linear 1x1 projection when
// the channel counts differ).
class DsResBlock final : public Block {
 public:
  DsResBlock(Builder& b, const std::string& name, int in_channels, int out_maps);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) override;
  int out_channels() const override { return out_maps_; }
  bool has_projection() const { return in_channels_ != out_maps_; }

 private:
  int in_channels_;
  int out_maps_;
  DepthwiseLayer depthwise_;
  ConvLayer pointwise_;
  BatchNormLayer bn_;
  ConvLayer projection_;
};

// Strided 3x3 conv -> batch-norm -> ReLU; also used for the stem.
class ConvBlock final : public Block {
 public:
  ConvBlock(Builder& b, const std::string& name, int in_channels, int out_maps, int stride);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) override;
  int out_channels() const override { return out_maps_; }

 private:
  int out_maps_;
  ConvBnRelu body_;
};

// Transposed conv restoring a tap at cumulative stride s to input resolution:
// kernel 2s (1 when s == 1), stride s.
class UpsampleBranch {
 public:
  UpsampleBranch(Builder& b, const std::string& name, int scale, int in_channels, int out_maps);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& tap) const;
  int scale() const { return scale_; }
  int out_channels() const { return out_maps_; }
  static int kernel_size(int scale) { return scale == 1 ? 1 : 2 * scale; }

 private:
  int scale_;
  int out_maps_;
  TransposedConvLayer deconv_;
};

// Concatenates branch volumes along channels and applies one D -> C matrix
// with bias at every pixel. Returns raw logits. The bias starts at a class
// prior that favours background and the weights start small.
class Readout {
 public:
  static constexpr double kForegroundPrior = 0.01;
  static constexpr double kInitialWeightStd = 0.01;

  Readout() = default;
  Readout(Builder& b, const std::string& name, int depth, int num_classes);
  ag::Variable forward(ag::Tape& tape, std::span<const ag::Variable> branches) const;
  // (D, C)
  std::pair<int, int> weight_shape() const {
    return {dense_.kernel.shape().w, dense_.kernel.shape().c};
  }
  const ConvLayer& dense() const { return dense_; }

 private:
  ConvLayer dense_;
};

}  // namespace cloudifier::model
