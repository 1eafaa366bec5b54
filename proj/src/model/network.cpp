#include "cloudifier/model/network.hpp"

namespace cloudifier::model {

Network::Network(NetworkConfig config, std::uint64_t seed) : config_(std::move(config)) {
  config_.validate();
  Builder b(seed);
  int channels = config_.input_channels;
  int stride = 1;
  std::vector<int> tap_channels;
  std::vector<int> tap_strides;
  for (std::size_t i = 0; i < config_.blocks.size(); ++i) {
    const BlockSpec& spec = config_.blocks[i];
    const std::string name = std::string(block_kind_name(spec.kind)) + std::to_string(i);
    switch (spec.kind) {
      case BlockKind::Stem:
        blocks_.push_back(std::make_unique<ConvBlock>(b, name, channels, spec.out_maps, 1));
        break;
      case BlockKind::DownsampleConv:
        blocks_.push_back(std::make_unique<ConvBlock>(b, name, channels, spec.out_maps, 2));
        stride *= 2;
        break;
      case BlockKind::IncRes:
        blocks_.push_back(std::make_unique<IncResBlock>(b, name, channels, spec.out_maps));
        break;
      case BlockKind::DsRes:
        blocks_.push_back(std::make_unique<DsResBlock>(b, name, channels, spec.out_maps));
        break;
    }
    channels = spec.out_maps;
    if (spec.tap) {
      tap_blocks_.push_back(static_cast<int>(i));
      tap_channels.push_back(channels);
      tap_strides.push_back(stride);
    }
  }
  for (std::size_t t = 0; t < tap_blocks_.size(); ++t) {
    branches_.emplace_back(b, "branch" + std::to_string(t), tap_strides[t], tap_channels[t],
                           config_.branch_maps);
  }
  readout_ = Readout(b, "readout", config_.branch_maps * static_cast<int>(branches_.size()),
                     config_.num_classes);
  params_ = b.take_params();
  layers_ = b.take_layers();

  const std::string who = "network '" + config_.variant + "'";
  if (config_.expected_layers && layer_count() != *config_.expected_layers) {
    throw ConfigError(who + ": built " + std::to_string(layer_count()) + " layers, expected " +
                      std::to_string(*config_.expected_layers));
  }
  const std::size_t n = param_count();
  if (config_.min_params && n < *config_.min_params) {
    throw ConfigError(who + ": " + std::to_string(n) + " parameters, below the minimum " +
                      std::to_string(*config_.min_params));
  }
  if (config_.max_params && n > *config_.max_params) {
    throw ConfigError(who + ": " + std::to_string(n) + " parameters, above the maximum " +
                      std::to_string(*config_.max_params));
  }
}

void Network::check_input(const Shape& x) const {
  const int m = max_downsample();
  if (x.c != config_.input_channels) {
    throw ShapeError("network input " + x.str() + " needs " +
                     std::to_string(config_.input_channels) + " channels");
  }
  if (x.n <= 0 || x.h <= 0 || x.w <= 0 || x.h % m != 0 || x.w % m != 0) {
    throw ShapeError("network input " + x.str() + ": height and width must be positive multiples of " +
                     std::to_string(m));
  }
}

ag::Variable Network::forward(ag::Tape& tape, const ag::Variable& x, ops::BnMode mode) {
  check_input(x.shape());
  std::vector<ag::Variable> upsampled;
  upsampled.reserve(branches_.size());
  ag::Variable h = x;
  std::size_t next_tap = 0;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    h = blocks_[i]->forward(tape, h, mode);
    if (next_tap < tap_blocks_.size() && tap_blocks_[next_tap] == static_cast<int>(i)) {
      upsampled.push_back(branches_[next_tap].forward(tape, h));
      ++next_tap;
    }
  }
  return readout_.forward(tape, upsampled);
}

Tensor Network::infer(const Tensor& x) {
  ag::Tape tape(ag::Tape::Mode::Inference);
  return forward(tape, ag::Variable(x), ops::BnMode::Infer).value();
}

std::size_t Network::param_count() const {
  std::size_t total = 0;
  for (const auto& p : params_) {
    if (p.trainable) total += p.var.value().size();
  }
  return total;
}

std::vector<ag::Variable> Network::trainable() const {
  std::vector<ag::Variable> out;
  for (const auto& p : params_) {
    if (p.trainable) out.push_back(p.var);
  }
  return out;
}

}  // namespace cloudifier::model
