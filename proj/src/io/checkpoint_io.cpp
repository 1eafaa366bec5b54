#include "cloudifier/io/checkpoint_io.hpp"

#include <cstring>
#include <limits>

namespace cloudifier::io {

namespace {

std::vector<std::uint32_t> stored_dims(const model::ParamEntry& p) {
  const Shape& s = p.var.shape();
  if (p.logical_rank == 1) return {static_cast<std::uint32_t>(s.c)};
  return {static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.h),
          static_cast<std::uint32_t>(s.w), static_cast<std::uint32_t>(s.c)};
}

std::string dims_text(const std::vector<std::uint32_t>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + ")";
}

}  // namespace

Checkpoint checkpoint_of(const model::Network& net) {
  Checkpoint ckpt;
  ckpt.descriptor = net.config().descriptor();
  for (const auto& p : net.params()) {
    StoredTensor t;
    t.name = p.name;
    t.dims = stored_dims(p);
    const Tensor& v = p.var.value();
    t.data.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) t.data[i] = static_cast<float>(v.ptr()[i]);
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.raw(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.descriptor.size()));
  w.raw(ckpt.descriptor.data(), ckpt.descriptor.size());
  for (const auto& t : ckpt.tensors) {
    if (t.name.size() > std::numeric_limits<std::uint16_t>::max()) throw ConfigError("checkpoint: name too long");
    w.u16(static_cast<std::uint16_t>(t.name.size()));
    w.raw(t.name.data(), t.name.size());
    w.u8(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.u32(d);
    w.raw(t.data.data(), t.data.size() * sizeof(float));
  }
  return w.take();
}

Checkpoint parse_checkpoint(const std::string& bytes, const std::string& path) {
  ByteReader r(bytes, path);
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw IoError(IoErrorKind::BadMagic, path, "not a checkpoint file (magic is not CFNW)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw IoError(IoErrorKind::Version, path,
                  "checkpoint format version " + std::to_string(version) + ", this build reads " +
                      std::to_string(kCheckpointVersion));
  }
  Checkpoint ckpt;
  const std::uint32_t descriptor_len = r.u32("descriptor length");
  ckpt.descriptor.resize(descriptor_len);
  r.raw(ckpt.descriptor.data(), descriptor_len, "descriptor");
  while (r.remaining() > 0) {
    StoredTensor t;
    const std::uint16_t name_len = r.u16("tensor name length");
    t.name.resize(name_len);
    r.raw(t.name.data(), name_len, "tensor name");
    const std::uint8_t ndim = r.u8("tensor ndim");
    if (ndim != 1 && ndim != 4) {
      throw IoError(IoErrorKind::Corrupt, path, t.name + ": ndim " + std::to_string(ndim) + ", expected 1 or 4");
    }
    std::uint64_t count = 1;
    for (int d = 0; d < ndim; ++d) {
      t.dims.push_back(r.u32("tensor dims"));
      count *= t.dims.back();
    }
    if (count * sizeof(float) > r.remaining()) {
      throw IoError(IoErrorKind::Truncated, path, t.name + ": data for " + dims_text(t.dims) + " runs past end of file");
    }
    t.data.resize(count);
    r.raw(t.data.data(), count * sizeof(float), "tensor data");
    ckpt.tensors.push_back(std::move(t));
  }
  return ckpt;
}

std::unique_ptr<model::Network> network_from_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  model::NetworkConfig config;
  try {
    config = model::NetworkConfig::parse_descriptor(ckpt.descriptor);
  } catch (const ConfigError& e) {
    throw IoError(IoErrorKind::Corrupt, path, e.what());
  }
  auto net = std::make_unique<model::Network>(config, 0);
  const auto& params = net->params();
  if (params.size() != ckpt.tensors.size()) {
    throw IoError(IoErrorKind::ShapeMismatch, path,
                  "file holds " + std::to_string(ckpt.tensors.size()) + " tensors, the network declares " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const StoredTensor& t = ckpt.tensors[i];
    const auto& p = params[i];
    if (t.name != p.name) {
      throw IoError(IoErrorKind::ShapeMismatch, path,
                    "tensor " + std::to_string(i) + " is '" + t.name + "', expected '" + p.name + "'");
    }
    const auto dims = stored_dims(p);
    if (t.dims != dims) {
      throw IoError(IoErrorKind::ShapeMismatch, path,
                    t.name + " has shape " + dims_text(t.dims) + ", expected " + dims_text(dims));
    }
    Tensor& v = p.var.mutable_value();
    for (std::size_t k = 0; k < v.size(); ++k) v.ptr()[k] = static_cast<real_t>(t.data[k]);
  }
  return net;
}

void save_checkpoint(const std::string& path, const model::Network& net) {
  write_file_atomic(path, encode_checkpoint(checkpoint_of(net)));
}

Checkpoint read_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path), path); }

std::unique_ptr<model::Network> load_network(const std::string& path) {
  return network_from_checkpoint(read_checkpoint(path), path);
}

}  // namespace cloudifier::io
