#include "cloudifier/io/binary.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <iterator>

namespace cloudifier::io {

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

const char* io_error_kind_name(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::Io: return "io";
    case IoErrorKind::BadMagic: return "bad-magic";
    case IoErrorKind::Version: return "version";
    case IoErrorKind::Truncated: return "truncated";
    case IoErrorKind::Corrupt: return "corrupt";
    case IoErrorKind::ShapeMismatch: return "shape-mismatch";
  }
  return "?";
}

IoError::IoError(IoErrorKind kind, const std::string& path, const std::string& detail)
    : Error(path + ": " + io_error_kind_name(kind) + ": " + detail), kind_(kind), path_(path) {}

void ByteWriter::u16(std::uint16_t v) { raw(&v, sizeof v); }
void ByteWriter::u32(std::uint32_t v) { raw(&v, sizeof v); }
void ByteWriter::u64(std::uint64_t v) { raw(&v, sizeof v); }
void ByteWriter::f32(float v) { raw(&v, sizeof v); }
void ByteWriter::raw(const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  bytes_.append(p, n);
}
void ByteWriter::u16_array(std::span<const std::uint16_t> v) { raw(v.data(), v.size_bytes()); }

const char* ByteReader::take(std::size_t n, const char* field) {
  if (remaining() < n) {
    throw IoError(IoErrorKind::Truncated, path_,
                  std::string("file ends inside ") + field + " at byte " + std::to_string(pos_));
  }
  const char* p = bytes_.data() + pos_;
  pos_ += n;
  return p;
}

std::uint8_t ByteReader::u8(const char* field) { return static_cast<std::uint8_t>(*take(1, field)); }
std::uint16_t ByteReader::u16(const char* field) {
  std::uint16_t v;
  std::memcpy(&v, take(sizeof v, field), sizeof v);
  return v;
}
std::uint32_t ByteReader::u32(const char* field) {
  std::uint32_t v;
  std::memcpy(&v, take(sizeof v, field), sizeof v);
  return v;
}
std::uint64_t ByteReader::u64(const char* field) {
  std::uint64_t v;
  std::memcpy(&v, take(sizeof v, field), sizeof v);
  return v;
}
float ByteReader::f32(const char* field) {
  float v;
  std::memcpy(&v, take(sizeof v, field), sizeof v);
  return v;
}
void ByteReader::raw(void* out, std::size_t n, const char* field) { std::memcpy(out, take(n, field), n); }
void ByteReader::u16_array(std::uint16_t* out, std::size_t n, const char* field) {
  std::memcpy(out, take(n * sizeof(std::uint16_t), field), n * sizeof(std::uint16_t));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::Io, path, "cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(IoErrorKind::Io, path, "read failed");
  return bytes;
}

AtomicFile::AtomicFile(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
  out_.open(tmp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError(IoErrorKind::Io, path_, "cannot open for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::remove(tmp_.c_str());
  }
}

void AtomicFile::write(const std::string& bytes) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw IoError(IoErrorKind::Io, path_, "write failed");
}

void AtomicFile::commit() {
  out_.close();
  if (!out_) throw IoError(IoErrorKind::Io, path_, "close failed");
  if (std::rename(tmp_.c_str(), path_.c_str()) != 0) {
    throw IoError(IoErrorKind::Io, path_, "rename from temporary file failed");
  }
  committed_ = true;
}

void write_file_atomic(const std::string& path, const std::string& bytes) {
  AtomicFile file(path);
  file.write(bytes);
  file.commit();
}

}  // namespace cloudifier::io
