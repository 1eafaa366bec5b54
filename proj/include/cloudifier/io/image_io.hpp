#pragma once

#include <string>

#include "cloudifier/scene/canvas.hpp"

namespace cloudifier::io {

// PNG (any colour type, converted to 8-bit RGB; alpha is dropped) or binary
// PPM (P6, maxval 255), chosen by file signature.
scene::Image read_image(const std::string& path);

// Format chosen by extension: ".ppm" writes P6, anything else PNG.
void write_image(const std::string& path, const scene::Image& image);
std::string encode_png(const scene::Image& image);
std::string encode_ppm(const scene::Image& image);
scene::Image decode_png(const std::string& bytes, const std::string& path);
scene::Image decode_ppm(const std::string& bytes, const std::string& path);

}  // namespace cloudifier::io
