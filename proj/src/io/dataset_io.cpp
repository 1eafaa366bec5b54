#include "cloudifier/io/dataset_io.hpp"

#include <cstring>

namespace cloudifier::io {

using scene::Observation;

std::size_t DatasetHeader::observation_bytes() const {
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  return pixels * channels + pixels * 2 + 2 + pixels * 2;
}

DatasetHeader header_for(const scene::GeneratorConfig& config) {
  if (config.count < 0 || config.size <= 0 || config.size > 0xFFFF) {
    throw ConfigError("dataset: count and size must fit the header fields");
  }
  DatasetHeader h;
  h.count = static_cast<std::uint32_t>(config.count);
  h.height = h.width = static_cast<std::uint16_t>(config.size);
  h.num_classes = static_cast<std::uint16_t>(config.num_classes());
  h.granularity = config.granularity;
  h.theme = config.theme;
  h.seed = config.seed;
  return h;
}

scene::GeneratorConfig config_from_header(const DatasetHeader& header, const std::string& path) {
  if (header.height != header.width) {
    throw IoError(IoErrorKind::Corrupt, path, "generator settings need a square size");
  }
  scene::GeneratorConfig cfg;
  cfg.count = static_cast<int>(header.count);
  cfg.size = header.height;
  cfg.theme = header.theme;
  cfg.granularity = header.granularity;
  cfg.seed = header.seed;
  for (int limit : {0, 2, 3, 4, 5, 6, 7, 8, 9, 10}) {
    if (scene::num_classes(header.granularity, limit) == header.num_classes) {
      cfg.coarse_limit = limit;
      return cfg;
    }
  }
  throw IoError(IoErrorKind::Corrupt, path,
                "num_classes " + std::to_string(header.num_classes) + " matches no class table");
}

bool same_stored_content(const Observation& a, const Observation& b) {
  return a.image == b.image && a.labels == b.labels && a.instance_map == b.instance_map &&
         a.scene_label == b.scene_label && a.theme == b.theme;
}

namespace {

void encode_header(ByteWriter& w, const DatasetHeader& h) {
  w.raw(kDatasetMagic, 4);
  w.u32(h.version);
  w.u32(h.count);
  w.u16(h.height);
  w.u16(h.width);
  w.u16(h.channels);
  w.u16(h.num_classes);
  w.u8(static_cast<std::uint8_t>(h.granularity));
  w.u8(static_cast<std::uint8_t>(h.theme));
  w.u64(h.seed);
}

DatasetHeader decode_header(ByteReader& r) {
  char magic[4];
  r.raw(magic, 4, "magic");
  if (std::memcmp(magic, kDatasetMagic, 4) != 0) {
    throw IoError(IoErrorKind::BadMagic, r.path(), "not a dataset file (magic is not CFDS)");
  }
  DatasetHeader h;
  h.version = r.u32("version");
  if (h.version != kDatasetVersion) {
    throw IoError(IoErrorKind::Version, r.path(),
                  "dataset format version " + std::to_string(h.version) + ", this build reads " +
                      std::to_string(kDatasetVersion));
  }
  h.count = r.u32("count");
  h.height = r.u16("height");
  h.width = r.u16("width");
  h.channels = r.u16("channels");
  h.num_classes = r.u16("num_classes");
  const std::uint8_t g = r.u8("granularity");
  const std::uint8_t t = r.u8("theme");
  h.seed = r.u64("seed");
  if (h.channels != 3) {
    throw IoError(IoErrorKind::Corrupt, r.path(), "channels is " + std::to_string(h.channels) + ", expected 3");
  }
  if (h.height == 0 || h.width == 0) throw IoError(IoErrorKind::Corrupt, r.path(), "zero image size");
  if (h.num_classes < 2) throw IoError(IoErrorKind::Corrupt, r.path(), "num_classes below 2");
  if (g > 1) throw IoError(IoErrorKind::Corrupt, r.path(), "granularity byte " + std::to_string(g));
  if (t > 4) throw IoError(IoErrorKind::Corrupt, r.path(), "theme byte " + std::to_string(t));
  h.granularity = static_cast<scene::Granularity>(g);
  h.theme = static_cast<scene::ThemeKind>(t);
  return h;
}

void check_observation(const DatasetHeader& h, const Observation& obs, const std::string& where) {
  const std::size_t pixels = static_cast<std::size_t>(h.height) * h.width;
  if (obs.height() != h.height || obs.width() != h.width || obs.labels.size() != pixels ||
      obs.instance_map.size() != pixels || obs.image.px.size() != pixels * 3) {
    throw ShapeError(where + ": observation is " + std::to_string(obs.height()) + "x" +
                     std::to_string(obs.width()) + ", header says " + std::to_string(h.height) + "x" +
                     std::to_string(h.width));
  }
  for (auto v : obs.labels) {
    if (v >= h.num_classes) {
      throw ConfigError(where + ": label " + std::to_string(v) + " >= num_classes " +
                        std::to_string(h.num_classes));
    }
  }
  if (obs.scene_label >= h.num_classes) throw ConfigError(where + ": scene label out of range");
}

}  // namespace

DatasetWriter::DatasetWriter(const std::string& path, const DatasetHeader& header)
    : header_(header), file_(path) {
  if (header.channels != 3) throw ConfigError("dataset: channels must be 3");
  encode_header(buffer_, header_);
  file_.write(buffer_.bytes());
}

void DatasetWriter::append(const Observation& obs) {
  const std::string where = file_.path() + ": observation " + std::to_string(written_);
  if (written_ >= header_.count) throw ConfigError(where + ": more observations than the header count");
  check_observation(header_, obs, where);
  buffer_.clear();
  buffer_.raw(obs.image.px.data(), obs.image.px.size());
  buffer_.u16_array(obs.labels);
  buffer_.u16(obs.scene_label);
  buffer_.u16_array(obs.instance_map);
  file_.write(buffer_.bytes());
  ++written_;
}

void DatasetWriter::finish() {
  if (written_ != header_.count) {
    throw ConfigError(file_.path() + ": wrote " + std::to_string(written_) + " observations, header says " +
                      std::to_string(header_.count));
  }
  file_.commit();
}

void write_dataset(const std::string& path, const DatasetHeader& header,
                   const std::vector<Observation>& observations) {
  DatasetHeader h = header;
  h.count = static_cast<std::uint32_t>(observations.size());
  DatasetWriter writer(path, h);
  for (const auto& obs : observations) writer.append(obs);
  writer.finish();
}

void write_meta_batch(const std::string& path, const scene::MetaBatch& batch) {
  write_dataset(path, header_for(batch.config), batch.observations);
}

void generate_to_file(const std::string& path, const scene::GeneratorConfig& config) {
  DatasetWriter writer(path, header_for(config));
  scene::for_each_observation(config, [&](std::uint64_t, Observation&& obs) { writer.append(obs); });
  writer.finish();
}

DatasetHeader read_dataset_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::Io, path, "cannot open for reading");
  std::string bytes(kDatasetHeaderBytes, '\0');
  in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  bytes.resize(static_cast<std::size_t>(in.gcount()));
  ByteReader r(bytes, path);
  return decode_header(r);
}

Dataset parse_dataset(const std::string& bytes, const std::string& path) {
  ByteReader r(bytes, path);
  Dataset ds;
  ds.header = decode_header(r);
  const DatasetHeader& h = ds.header;
  const std::size_t expected = h.file_bytes();
  if (bytes.size() < expected) {
    throw IoError(IoErrorKind::Truncated, path,
                  "file has " + std::to_string(bytes.size()) + " bytes, header implies " +
                      std::to_string(expected));
  }
  if (bytes.size() > expected) {
    throw IoError(IoErrorKind::Corrupt, path,
                  std::to_string(bytes.size() - expected) + " trailing bytes after the last observation");
  }
  const std::size_t pixels = static_cast<std::size_t>(h.height) * h.width;
  ds.observations.reserve(h.count);
  for (std::uint32_t i = 0; i < h.count; ++i) {
    Observation obs;
    obs.image = scene::Image(h.height, h.width);
    r.raw(obs.image.px.data(), pixels * 3, "image");
    obs.labels.resize(pixels);
    r.u16_array(obs.labels.data(), pixels, "labels");
    obs.scene_label = r.u16("scene_label");
    obs.instance_map.resize(pixels);
    r.u16_array(obs.instance_map.data(), pixels, "instance_map");
    obs.theme = scene::theme_for_index(h.theme, i);
    for (auto v : obs.labels) {
      if (v >= h.num_classes) {
        throw IoError(IoErrorKind::Corrupt, path,
                      "observation " + std::to_string(i) + " has label " + std::to_string(v) +
                          " >= num_classes " + std::to_string(h.num_classes));
      }
    }
    if (obs.scene_label >= h.num_classes) {
      throw IoError(IoErrorKind::Corrupt, path, "observation " + std::to_string(i) + " scene label out of range");
    }
    ds.observations.push_back(std::move(obs));
  }
  return ds;
}

Dataset read_dataset(const std::string& path) { return parse_dataset(read_file(path), path); }

}  // namespace cloudifier::io
