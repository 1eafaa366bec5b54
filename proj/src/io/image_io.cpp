#include "cloudifier/io/image_io.hpp"

#include <png.h>

#include <cstring>
#include <sstream>

#include "cloudifier/io/binary.hpp"

namespace cloudifier::io {

namespace {

struct PngRead {
  const std::string* bytes;
  std::size_t pos;
};

void png_read_fn(png_structp png, png_bytep out, png_size_t n) {
  auto* src = static_cast<PngRead*>(png_get_io_ptr(png));
  if (src->bytes->size() - src->pos < n) png_error(png, "unexpected end of data");
  std::memcpy(out, src->bytes->data() + src->pos, n);
  src->pos += n;
}

void png_write_fn(png_structp png, png_bytep data, png_size_t n) {
  static_cast<std::string*>(png_get_io_ptr(png))->append(reinterpret_cast<const char*>(data), n);
}

void png_flush_fn(png_structp) {}

void png_error_fn(png_structp png, png_const_charp msg) {
  *static_cast<std::string*>(png_get_error_ptr(png)) = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

scene::Image decode_png(const std::string& bytes, const std::string& path) {
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    throw IoError(IoErrorKind::BadMagic, path, "not a PNG file");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoErrorKind::Io, path, "libpng initialisation failed");
  }
  PngRead src{&bytes, 0};
  scene::Image image;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoErrorKind::Corrupt, path, "PNG decode failed: " + message);
  }
  png_set_read_fn(png, &src, png_read_fn);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(w) * 3) {
    png_error(png, "unexpected row layout after conversion to RGB");
  }
  image = scene::Image(h, w);
  rows.resize(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[static_cast<std::size_t>(y)] = image.px.data() + static_cast<std::size_t>(y) * w * 3;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

std::string encode_png(const scene::Image& image) {
  std::string out, message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_fn, png_warning_fn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error("libpng initialisation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encode failed: " + message);
  }
  png_set_write_fn(png, &out, png_write_fn, png_flush_fn);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(image.px.data() + static_cast<std::size_t>(y) * image.width * 3);
  }
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

scene::Image decode_ppm(const std::string& bytes, const std::string& path) {
  std::istringstream in(bytes);
  std::string magic;
  in >> magic;
  if (magic != "P6") throw IoError(IoErrorKind::BadMagic, path, "not a binary PPM (P6) file");
  auto next_int = [&](const char* field) {
    while (in >> std::ws && in.peek() == '#') {
      std::string comment;
      std::getline(in, comment);
    }
    long v = -1;
    if (!(in >> v) || v <= 0) throw IoError(IoErrorKind::Corrupt, path, std::string("bad PPM ") + field);
    return v;
  };
  const long w = next_int("width");
  const long h = next_int("height");
  const long maxval = next_int("maxval");
  if (maxval != 255) throw IoError(IoErrorKind::Corrupt, path, "PPM maxval must be 255");
  if (w > 65535 || h > 65535) throw IoError(IoErrorKind::Corrupt, path, "PPM dimensions too large");
  in.get();
  const auto offset = static_cast<std::size_t>(in.tellg());
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3;
  if (bytes.size() < offset + need) throw IoError(IoErrorKind::Truncated, path, "PPM pixel data is short");
  scene::Image image(static_cast<int>(h), static_cast<int>(w));
  std::memcpy(image.px.data(), bytes.data() + offset, need);
  return image;
}

std::string encode_ppm(const scene::Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.px.data()), image.px.size());
  return out;
}

scene::Image read_image(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes, path);
  if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
    return decode_png(bytes, path);
  }
  throw IoError(IoErrorKind::BadMagic, path, "unsupported image format (expected PNG or P6 PPM)");
}

void write_image(const std::string& path, const scene::Image& image) {
  write_file_atomic(path, has_suffix(path, ".ppm") ? encode_ppm(image) : encode_png(image));
}

}  // namespace cloudifier::io
