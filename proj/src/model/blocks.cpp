#include "cloudifier/model/blocks.hpp"

#include <array>
#include <cmath>

namespace cloudifier::model {

IncResBlock::Widths IncResBlock::column_widths(int out_maps) {
  if (out_maps < 4 || out_maps % 4 != 0) {
    throw ConfigError("IncRes block needs out_maps divisible by 4, got " + std::to_string(out_maps));
  }
  return {out_maps / 2, out_maps / 2, out_maps / 2, out_maps / 4, out_maps / 4};
}

IncResBlock::IncResBlock(Builder& b, const std::string& name, int in_channels, int out_maps)
    : in_channels_(in_channels), out_maps_(out_maps) {
  if (in_channels <= 0) throw ConfigError(name + ": in_channels must be positive");
  const Widths w = column_widths(out_maps);
  stem_ = ConvLayer(b, name + ".stem", 1, in_channels, out_maps, 1, true, Init::LinearNormal);
  col_a_ = ConvBnRelu(b, name + ".col_a", 1, out_maps, w.a);
  col_b_reduce_ = ConvBnRelu(b, name + ".col_b_reduce", 1, out_maps, w.b_reduce);
  col_b_ = ConvBnRelu(b, name + ".col_b", 3, w.b_reduce, w.b);
  col_c_reduce_ = ConvBnRelu(b, name + ".col_c_reduce", 1, out_maps, w.c_reduce);
  col_c_ = ConvBnRelu(b, name + ".col_c", 5, w.c_reduce, w.c);
  bottleneck_ = ConvLayer(b, name + ".bottleneck", 1, w.a + w.b + w.c, out_maps, 1, true,
                          Init::LinearNormal);
}

ag::Variable IncResBlock::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  const ag::Variable prepared = stem_.forward(tape, x);
  const std::array<ag::Variable, 3> columns{
      col_a_.forward(tape, prepared, mode),
      col_b_.forward(tape, col_b_reduce_.forward(tape, prepared, mode), mode),
      col_c_.forward(tape, col_c_reduce_.forward(tape, prepared, mode), mode)};
  const ag::Variable merged = bottleneck_.forward(tape, ag::concat_channels(tape, columns));
  const ag::Variable& skip = in_channels_ == out_maps_ ? x : prepared;
  return ag::add(tape, skip, merged);
}

DsResBlock::DsResBlock(Builder& b, const std::string& name, int in_channels, int out_maps)
    : in_channels_(in_channels), out_maps_(out_maps) {
  if (in_channels <= 0 || out_maps <= 0) throw ConfigError(name + ": channel counts must be positive");
  depthwise_ = DepthwiseLayer(b, name + ".depthwise", 3, in_channels);
  pointwise_ = ConvLayer(b, name + ".pointwise", 1, in_channels, out_maps, 1, true, Init::HeNormal,
                         LayerKind::Pointwise);
  bn_ = BatchNormLayer(b, name + ".bn", out_maps);
  if (in_channels != out_maps) {
    projection_ = ConvLayer(b, name + ".projection", 1, in_channels, out_maps, 1, false,
                            Init::LinearNormal, LayerKind::Pointwise);
  }
}

ag::Variable DsResBlock::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  const ag::Variable body =
      ag::relu(tape, bn_.forward(tape, pointwise_.forward(tape, depthwise_.forward(tape, x)), mode));
  const ag::Variable skip = has_projection() ? projection_.forward(tape, x) : x;
  return ag::add(tape, skip, body);
}

ConvBlock::ConvBlock(Builder& b, const std::string& name, int in_channels, int out_maps, int stride)
    : out_maps_(out_maps), body_(b, name, 3, in_channels, out_maps, stride) {}

ag::Variable ConvBlock::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  return body_.forward(tape, x, mode);
}

UpsampleBranch::UpsampleBranch(Builder& b, const std::string& name, int scale, int in_channels,
                               int out_maps)
    : scale_(scale), out_maps_(out_maps) {
  if (scale < 1 || (scale & (scale - 1)) != 0) {
    throw ConfigError(name + ": upsample scale must be a power of two, got " + std::to_string(scale));
  }
  deconv_ = TransposedConvLayer(b, name + ".deconv", kernel_size(scale), scale, in_channels, out_maps);
}

ag::Variable UpsampleBranch::forward(ag::Tape& tape, const ag::Variable& tap) const {
  return deconv_.forward(tape, tap);
}

Readout::Readout(Builder& b, const std::string& name, int depth, int num_classes)
    : dense_(b, name + ".dense", 1, depth, num_classes, 1, true, Init::LinearNormal,
             LayerKind::Dense) {
  // Small weights let the bias prior decide the initial prediction:
  // background with probability 1 - kForegroundPrior, the rest split evenly.
  const double rescale = kInitialWeightStd * std::sqrt(static_cast<double>(depth));
  for (auto& v : dense_.kernel.mutable_value().data()) v = static_cast<real_t>(v * rescale);
  if (num_classes > 1) {
    dense_.bias.mutable_value()[0] = static_cast<real_t>(
        std::log((1.0 - kForegroundPrior) * (num_classes - 1) / kForegroundPrior));
  }
}

ag::Variable Readout::forward(ag::Tape& tape, std::span<const ag::Variable> branches) const {
  if (branches.empty()) throw ShapeError("readout: no branches");
  if (branches.size() == 1) return dense_.forward(tape, branches.front());
  return dense_.forward(tape, ag::concat_channels(tape, branches));
}

}  // namespace cloudifier::model
