#pragma once

#include <string>
#include <vector>

#include "cloudifier/autograd/functional.hpp"
#include "cloudifier/rng.hpp"

namespace cloudifier::model {

// What a layer counts as in the layer total. Batch-norm, activations, adds
// and concats are not layers.
enum class LayerKind { Conv, Depthwise, Pointwise, Transposed, Dense };
const char* layer_kind_name(LayerKind kind);

struct LayerRecord {
  std::string name;
  LayerKind kind;
};

// One stored tensor. Trainable entries are optimized; the rest (batch-norm
// running statistics) are state that still round-trips through checkpoints.
struct ParamEntry {
  std::string name;
  ag::Variable var;
  bool trainable = true;
  int logical_rank = 4;  // 1 for per-channel vectors
};

enum class Init { HeNormal, LinearNormal, Zeros, Ones };

// Collects parameters and layer records in declaration order while a network
// is being constructed.
class Builder {
 public:
  explicit Builder(std::uint64_t seed) : rng_(seed) {}

  ag::Variable param(const std::string& name, Shape shape, Init init, int fan_in,
                     bool trainable = true, int logical_rank = 4);
  void layer(const std::string& name, LayerKind kind) { layers_.push_back({name, kind}); }

  std::vector<ParamEntry> take_params() { return std::move(params_); }
  std::vector<LayerRecord> take_layers() { return std::move(layers_); }

 private:
  Rng rng_;
  std::vector<ParamEntry> params_;
  std::vector<LayerRecord> layers_;
};

class ConvLayer {
 public:
  ConvLayer() = default;
  ConvLayer(Builder& b, const std::string& name, int k, int c_in, int c_out, int stride,
            bool bias, Init init, LayerKind kind = LayerKind::Conv);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x) const;

  ag::Variable kernel;
  ag::Variable bias;  // undefined when bias-free
  int stride = 1;
};

class BatchNormLayer {
 public:
  BatchNormLayer() = default;
  BatchNormLayer(Builder& b, const std::string& name, int channels);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode);

  ag::BatchNormState state;
};

// conv (no bias) -> batch-norm -> ReLU
class ConvBnRelu {
 public:
  ConvBnRelu() = default;
  ConvBnRelu(Builder& b, const std::string& name, int k, int c_in, int c_out, int stride = 1);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode);

  ConvLayer conv;
  BatchNormLayer bn;
};

class DepthwiseLayer {
 public:
  DepthwiseLayer() = default;
  DepthwiseLayer(Builder& b, const std::string& name, int k, int channels);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x) const;

  ag::Variable kernel;
};

class TransposedConvLayer {
 public:
  TransposedConvLayer() = default;
  TransposedConvLayer(Builder& b, const std::string& name, int k, int stride, int c_in, int c_out);
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x) const;

  ag::Variable kernel;  // (k, k, c_out, c_in)
  ag::Variable bias;
  int stride = 1;
};

}  // namespace cloudifier::model
