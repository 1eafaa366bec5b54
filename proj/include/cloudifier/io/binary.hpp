#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "cloudifier/common.hpp"

namespace cloudifier::io {

enum class IoErrorKind {
  Io,             // the file cannot be opened, read or written
  BadMagic,       // not a file of the expected type
  Version,        // a known file type in an unsupported version
  Truncated,      // the file ends before the declared content
  Corrupt,        // content violates a format invariant
  ShapeMismatch,  // stored tensors do not fit the declared network or header
};
const char* io_error_kind_name(IoErrorKind kind);

// Structured file error; the message names the file and field.
class IoError : public Error {
 public:
  IoError(IoErrorKind kind, const std::string& path, const std::string& detail);
  IoErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  IoErrorKind kind_;
  std::string path_;
};

// Little-endian serializer into an in-memory buffer.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void raw(const void* data, std::size_t n);
  void u16_array(std::span<const std::uint16_t> v);

  const std::string& bytes() const { return bytes_; }
  std::string take() { return std::move(bytes_); }
  void clear() { bytes_.clear(); }

 private:
  std::string bytes_;
};

// Little-endian reader over a byte span; running off the end raises a
// Truncated IoError naming `field`.
class ByteReader {
 public:
  ByteReader(std::span<const char> bytes, std::string path) : bytes_(bytes), path_(std::move(path)) {}
  std::uint8_t u8(const char* field);
  std::uint16_t u16(const char* field);
  std::uint32_t u32(const char* field);
  std::uint64_t u64(const char* field);
  float f32(const char* field);
  void raw(void* out, std::size_t n, const char* field);
  void u16_array(std::uint16_t* out, std::size_t n, const char* field);

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& path() const { return path_; }

 private:
  const char* take(std::size_t n, const char* field);
  std::span<const char> bytes_;
  std::size_t pos_ = 0;
  std::string path_;
};

std::string read_file(const std::string& path);

// Writes to `path`.tmp and renames it over `path` on commit(); an uncommitted
// file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  void write(const std::string& bytes);
  void commit();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::string& path, const std::string& bytes);

}  // namespace cloudifier::io
