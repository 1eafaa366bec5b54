#pragma once

#include <memory>
#include <vector>

#include "cloudifier/model/blocks.hpp"
#include "cloudifier/model/network_config.hpp"

namespace cloudifier::model {

// Stem -> blocks (with strided downsampling convs between stages) -> one
// upsampling branch per tapped DS RES block -> per-fiber readout.
//
// Layer counting: every conv (depthwise and pointwise separately), every
// transposed conv and the readout dense map count as one layer. Batch-norm,
// activations, adds and concats do not.
class Network {
 public:
  // Throws ConfigError when the config is invalid or a budget assertion in it
  // (expected_layers, min_params, max_params) does not hold.
  Network(NetworkConfig config, std::uint64_t seed);

  // Raw logits (n, h, w, num_classes).
  ag::Variable forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode);
  // Inference-mode logits without recording gradients.
  Tensor infer(const Tensor& x);

  // Throws ShapeError unless h and w are multiples of max_downsample().
  void check_input(const Shape& x) const;

  const NetworkConfig& config() const { return config_; }
  int num_classes() const { return config_.num_classes; }
  int max_downsample() const { return config_.max_downsample(); }

  int layer_count() const { return static_cast<int>(layers_.size()); }
  // Trainable scalars only; batch-norm running statistics are excluded.
  std::size_t param_count() const;

  // Every stored tensor (trainable and running statistics) in declaration order.
  const std::vector<ParamEntry>& params() const { return params_; }
  std::vector<ag::Variable> trainable() const;
  const std::vector<LayerRecord>& layers() const { return layers_; }
  const Readout& readout() const { return readout_; }

 private:
  NetworkConfig config_;
  std::vector<std::unique_ptr<Block>> blocks_;
  std::vector<int> tap_blocks_;  // indices into blocks_
  std::vector<UpsampleBranch> branches_;
  Readout readout_;
  std::vector<ParamEntry> params_;
  std::vector<LayerRecord> layers_;
};

}  // namespace cloudifier::model
