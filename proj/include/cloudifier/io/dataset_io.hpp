#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cloudifier/io/binary.hpp"
#include "cloudifier/scene/scene.hpp"

namespace cloudifier::io {

// Dataset file, little-endian throughout:
//   "CFDS", version u32, count u32, H u16, W u16, channels u16 (= 3),
//   num_classes u16, granularity u8, theme kind u8, seed u64
// then per observation: image H*W*3 u8, labels H*W u16, scene label u16,
// instance map H*W u16.
inline constexpr char kDatasetMagic[4] = {'C', 'F', 'D', 'S'};
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 30;

struct DatasetHeader {
  std::uint32_t version = kDatasetVersion;
  std::uint32_t count = 0;
  std::uint16_t height = 0;
  std::uint16_t width = 0;
  std::uint16_t channels = 3;
  std::uint16_t num_classes = 0;
  scene::Granularity granularity = scene::Granularity::Coarse;
  scene::ThemeKind theme = scene::ThemeKind::Mixed;
  std::uint64_t seed = 0;

  std::size_t observation_bytes() const;
  std::size_t file_bytes() const { return kDatasetHeaderBytes + count * observation_bytes(); }
  friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

DatasetHeader header_for(const scene::GeneratorConfig& config);
// Generator settings recorded by a header; the coarse limit is recovered from
// num_classes. Throws IoError(Corrupt) for a non-square or unreachable header.
scene::GeneratorConfig config_from_header(const DatasetHeader& header, const std::string& path);

// Observations as stored. Theme per observation follows the header theme
// (round-robin for mixed); the widget list is not stored and comes back empty.
struct Dataset {
  DatasetHeader header;
  std::vector<scene::Observation> observations;
};

// Content stored in a dataset file: image, labels, instance map, scene label, theme.
bool same_stored_content(const scene::Observation& a, const scene::Observation& b);

// Appends observations one at a time; the file appears atomically on finish()
// and only if exactly header.count observations were written.
class DatasetWriter {
 public:
  DatasetWriter(const std::string& path, const DatasetHeader& header);
  void append(const scene::Observation& obs);
  void finish();

 private:
  DatasetHeader header_;
  AtomicFile file_;
  std::uint32_t written_ = 0;
  ByteWriter buffer_;
};

void write_dataset(const std::string& path, const DatasetHeader& header,
                   const std::vector<scene::Observation>& observations);
void write_meta_batch(const std::string& path, const scene::MetaBatch& batch);
// Streams generation straight to disk without holding the batch in memory.
void generate_to_file(const std::string& path, const scene::GeneratorConfig& config);

DatasetHeader read_dataset_header(const std::string& path);
Dataset read_dataset(const std::string& path);
Dataset parse_dataset(const std::string& bytes, const std::string& path);

}  // namespace cloudifier::io
