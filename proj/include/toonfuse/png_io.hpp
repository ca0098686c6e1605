#pragma once

// 8-bit RGB PNG encode/decode. Decoding accepts gray, palette and alpha
// variants (alpha is dropped); encoding always writes 8-bit RGB, no alpha.

#include <filesystem>
#include <span>

#include "toonfuse/binary_io.hpp"
#include "toonfuse/image.hpp"

namespace toonfuse {

Bytes encode_png(const ImageBuffer& image);
ImageBuffer decode_png(std::span<const std::uint8_t> bytes);

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& image);

/// round(v * 255)
std::uint8_t quantize(double v);

}  // namespace toonfuse
