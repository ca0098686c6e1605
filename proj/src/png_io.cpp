#include "toonfuse/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace toonfuse {

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Bytes encode_png(const ImageBuffer& image) {
    std::vector<std::uint8_t> pixels(image.size());
    for (std::size_t k = 0; k < image.size(); ++k) pixels[k] = quantize(image.values()[k]);

    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png, nullptr, &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("png encode failed: ") + png.message);
    }
    Bytes out(size);
    if (!png_image_write_to_memory(&png, out.data(), &size, 0, pixels.data(), 0, nullptr)) {
        throw IoError(std::string("png encode failed: ") + png.message);
    }
    out.resize(size);
    return out;
}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        throw FormatError(std::string("png decode failed: ") + png.message);
    }
    png.format = PNG_FORMAT_RGB;
    // Alpha, if present, is composited over this zeroed (black) buffer.
    std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(png), 0);
    if (!png_image_finish_read(&png, nullptr, pixels.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw FormatError("png decode failed: " + msg);
    }
    if (png.width == 0 || png.height == 0) throw FormatError("png decode failed: empty image");
    std::vector<double> values(pixels.size());
    for (std::size_t k = 0; k < pixels.size(); ++k) values[k] = pixels[k] / 255.0;
    return ImageBuffer(png.height, png.width, std::move(values));
}

ImageBuffer read_png(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    try {
        return decode_png(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
    write_file_atomic(path, encode_png(image));
}

}  // namespace toonfuse
