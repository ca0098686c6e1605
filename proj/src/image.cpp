#include "toonfuse/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace toonfuse {

ImageBuffer::ImageBuffer(std::size_t height, std::size_t width)
    : height_(height), width_(width), values_(height * width * kChannels, 0.0) {
    if (height == 0 || width == 0) throw ValidationError("image", "dimensions must be positive");
}

ImageBuffer::ImageBuffer(std::size_t height, std::size_t width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
    if (height == 0 || width == 0) throw ValidationError("image", "dimensions must be positive");
    if (values_.size() != height * width * kChannels) {
        throw DimensionError("image: expected " + std::to_string(height * width * kChannels) + " values, got " +
                             std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("image", "pixel values must lie in [0,1]");
    }
}

ImageBuffer ImageBuffer::clamped(std::size_t height, std::size_t width, std::vector<double> values) {
    for (double& v : values) {
        if (!std::isfinite(v)) throw NumericError("image: non-finite pixel value");
        v = std::clamp(v, 0.0, 1.0);
    }
    return ImageBuffer(height, width, std::move(values));
}

ImageBuffer ImageBuffer::filled(std::size_t height, std::size_t width, double r, double g, double b) {
    std::vector<double> values(height * width * kChannels);
    for (std::size_t p = 0; p < height * width; ++p) {
        values[p * 3 + 0] = r;
        values[p * 3 + 1] = g;
        values[p * 3 + 2] = b;
    }
    return ImageBuffer(height, width, std::move(values));
}

ImageBuffer resize_bilinear(const ImageBuffer& image, std::size_t height, std::size_t width) {
    if (image.height() == height && image.width() == width) return image;
    std::vector<double> out(height * width * 3);
    const double sy = static_cast<double>(image.height()) / static_cast<double>(height);
    const double sx = static_cast<double>(image.width()) / static_cast<double>(width);
    const auto src_h = static_cast<std::ptrdiff_t>(image.height());
    const auto src_w = static_cast<std::ptrdiff_t>(image.width());
    for (std::size_t y = 0; y < height; ++y) {
        const double fy = std::max(0.0, (static_cast<double>(y) + 0.5) * sy - 0.5);
        const auto y0 = std::min(static_cast<std::ptrdiff_t>(fy), src_h - 1);
        const auto y1 = std::min(y0 + 1, src_h - 1);
        const double ty = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < width; ++x) {
            const double fx = std::max(0.0, (static_cast<double>(x) + 0.5) * sx - 0.5);
            const auto x0 = std::min(static_cast<std::ptrdiff_t>(fx), src_w - 1);
            const auto x1 = std::min(x0 + 1, src_w - 1);
            const double tx = fx - static_cast<double>(x0);
            for (std::size_t c = 0; c < 3; ++c) {
                const double top = (1 - tx) * image.at(y0, x0, c) + tx * image.at(y0, x1, c);
                const double bot = (1 - tx) * image.at(y1, x0, c) + tx * image.at(y1, x1, c);
                out[(y * width + x) * 3 + c] = (1 - ty) * top + ty * bot;
            }
        }
    }
    return ImageBuffer::clamped(height, width, std::move(out));
}

std::vector<double> box_downsample(const ImageBuffer& image, std::size_t cells, std::size_t channel) {
    std::vector<double> out(cells * cells);
    const std::size_t h = image.height();
    const std::size_t w = image.width();
    for (std::size_t u = 0; u < cells; ++u) {
        const std::size_t y0 = std::min(u * h / cells, h - 1);
        const std::size_t y1 = std::max(y0 + 1, (u + 1) * h / cells);
        for (std::size_t v = 0; v < cells; ++v) {
            const std::size_t x0 = std::min(v * w / cells, w - 1);
            const std::size_t x1 = std::max(x0 + 1, (v + 1) * w / cells);
            double acc = 0.0;
            for (std::size_t y = y0; y < y1; ++y) {
                for (std::size_t x = x0; x < x1; ++x) acc += image.at(y, x, channel);
            }
            out[u * cells + v] = acc / static_cast<double>((y1 - y0) * (x1 - x0));
        }
    }
    return out;
}

double max_abs_difference(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) throw DimensionError("max_abs_difference: image sizes differ");
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    return m;
}

}  // namespace toonfuse
