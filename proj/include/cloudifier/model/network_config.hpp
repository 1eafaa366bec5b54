#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cloudifier::model {

enum class BlockKind { Stem, IncRes, DsRes, DownsampleConv };
const char* block_kind_name(BlockKind kind);

struct BlockSpec {
  BlockKind kind;
  int out_maps = 0;
  int stride = 1;     // 2 for DownsampleConv, 1 otherwise
  bool tap = false;   // DsRes output feeds an upsampling branch

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

struct NetworkConfig {
  std::string variant = "custom";
  int num_classes = 11;
  int input_channels = 3;
  int branch_maps = 6;  // channels of every upsampling branch
  std::vector<BlockSpec> blocks;

  // Budget assertions checked when the network is built.
  std::optional<int> expected_layers;
  std::optional<std::size_t> min_params;
  std::optional<std::size_t> max_params;

  // Cumulative downsample factor after all blocks.
  int max_downsample() const;
  // Throws ConfigError on any structural violation.
  void validate() const;

  // Ordered key=value lines; parse_descriptor(descriptor()) round-trips.
  std::string descriptor() const;
  static NetworkConfig parse_descriptor(const std::string& text);

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Named variants. `num_classes` overrides the readout width.
NetworkConfig cloudifier109(int num_classes = 11);
NetworkConfig cloudifier50(int num_classes = 11);
NetworkConfig micro(int num_classes = 5);
NetworkConfig variant_by_name(const std::string& name, int num_classes);

}  // namespace cloudifier::model
