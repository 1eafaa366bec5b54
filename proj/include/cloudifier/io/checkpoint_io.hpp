#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cloudifier/io/binary.hpp"
#include "cloudifier/model/network.hpp"

namespace cloudifier::io {

// Checkpoint file, little-endian throughout:
//   "CFNW", version u32, descriptor length u32, descriptor bytes (UTF-8)
// then per stored tensor in declaration order: name length u16, name bytes,
// ndim u8, dims u32 each, float32 data.
// Kernels are stored with 4 dims, per-channel vectors (biases, batch-norm
// scale, shift and running statistics) with 1.
inline constexpr char kCheckpointMagic[4] = {'C', 'F', 'N', 'W'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct StoredTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
  friend bool operator==(const StoredTensor&, const StoredTensor&) = default;
};

struct Checkpoint {
  std::string descriptor;
  std::vector<StoredTensor> tensors;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

Checkpoint checkpoint_of(const model::Network& net);
std::string encode_checkpoint(const Checkpoint& ckpt);
// Validates framing only; needs no network.
Checkpoint parse_checkpoint(const std::string& bytes, const std::string& path);

// Rebuilds the network from the descriptor and installs the stored tensors.
// Throws IoError(ShapeMismatch) when names, order or shapes differ from the
// rebuilt graph.
std::unique_ptr<model::Network> network_from_checkpoint(const Checkpoint& ckpt, const std::string& path);

void save_checkpoint(const std::string& path, const model::Network& net);
Checkpoint read_checkpoint(const std::string& path);
std::unique_ptr<model::Network> load_network(const std::string& path);

}  // namespace cloudifier::io
