#include "cloudifier/model/layers.hpp"

#include <algorithm>
#include <cmath>

namespace cloudifier::model {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::Depthwise: return "depthwise";
    case LayerKind::Pointwise: return "pointwise";
    case LayerKind::Transposed: return "transposed";
    case LayerKind::Dense: return "dense";
  }
  return "?";
}

ag::Variable Builder::param(const std::string& name, Shape shape, Init init, int fan_in,
                            bool trainable, int logical_rank) {
  Tensor t(shape);
  switch (init) {
    case Init::Zeros: break;
    case Init::Ones: t.fill(real_t{1}); break;
    case Init::HeNormal:
    case Init::LinearNormal: {
      const double gain = init == Init::HeNormal ? 2.0 : 1.0;
      const double std_dev = std::sqrt(gain / std::max(fan_in, 1));
      for (auto& v : t.data()) v = static_cast<real_t>(rng_.normal() * std_dev);
      break;
    }
  }
  ag::Variable var(std::move(t), trainable, name);
  params_.push_back(ParamEntry{name, var, trainable, logical_rank});
  return var;
}

ConvLayer::ConvLayer(Builder& b, const std::string& name, int k, int c_in, int c_out, int stride,
                     bool has_bias, Init init, LayerKind kind)
    : stride(stride) {
  kernel = b.param(name + ".kernel", Shape{k, k, c_in, c_out}, init, k * k * c_in);
  if (has_bias) bias = b.param(name + ".bias", Shape::vec(c_out), Init::Zeros, 1, true, 1);
  b.layer(name, kind);
}

ag::Variable ConvLayer::forward(ag::Tape& tape, const ag::Variable& x) const {
  return ag::conv2d(tape, x, kernel, bias, stride, ops::Padding::Same);
}

BatchNormLayer::BatchNormLayer(Builder& b, const std::string& name, int channels) {
  state.gamma = b.param(name + ".gamma", Shape::vec(channels), Init::Ones, 1, true, 1);
  state.beta = b.param(name + ".beta", Shape::vec(channels), Init::Zeros, 1, true, 1);
  state.running_mean =
      b.param(name + ".running_mean", Shape::vec(channels), Init::Zeros, 1, false, 1);
  state.running_var = b.param(name + ".running_var", Shape::vec(channels), Init::Ones, 1, false, 1);
}

ag::Variable BatchNormLayer::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  return ag::batch_norm(tape, x, state, mode);
}

ConvBnRelu::ConvBnRelu(Builder& b, const std::string& name, int k, int c_in, int c_out, int stride)
    : conv(b, name + ".conv", k, c_in, c_out, stride, false, Init::HeNormal),
      bn(b, name + ".bn", c_out) {}

ag::Variable ConvBnRelu::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  return ag::relu(tape, bn.forward(tape, conv.forward(tape, x), mode));
}

DepthwiseLayer::DepthwiseLayer(Builder& b, const std::string& name, int k, int channels) {
  kernel = b.param(name + ".kernel", Shape{k, k, 1, channels}, Init::LinearNormal, k * k);
  b.layer(name, LayerKind::Depthwise);
}

ag::Variable DepthwiseLayer::forward(ag::Tape& tape, const ag::Variable& x) const {
  return ag::depthwise_conv2d(tape, x, kernel, 1);
}

TransposedConvLayer::TransposedConvLayer(Builder& b, const std::string& name, int k, int stride,
                                         int c_in, int c_out)
    : stride(stride) {
  // Each output pixel receives (k / stride)^2 taps per input channel.
  const int taps = (k / stride) * (k / stride);
  kernel = b.param(name + ".kernel", Shape{k, k, c_out, c_in}, Init::LinearNormal, taps * c_in);
  bias = b.param(name + ".bias", Shape::vec(c_out), Init::Zeros, 1, true, 1);
  b.layer(name, LayerKind::Transposed);
}

ag::Variable TransposedConvLayer::forward(ag::Tape& tape, const ag::Variable& x) const {
  return ag::conv2d_transpose(tape, x, kernel, bias, stride);
}

}  // namespace cloudifier::model
