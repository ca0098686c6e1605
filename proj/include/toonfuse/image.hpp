#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "toonfuse/errors.hpp"

namespace toonfuse {

/// H x W x 3 image, interleaved RGB, row-major, every value in [0,1].
class ImageBuffer {
public:
    static constexpr std::size_t kChannels = 3;

    ImageBuffer() = default;
    ImageBuffer(std::size_t height, std::size_t width);
    ImageBuffer(std::size_t height, std::size_t width, std::vector<double> values);

    /// Clamps each value into [0,1]; non-finite values are rejected.
    static ImageBuffer clamped(std::size_t height, std::size_t width, std::vector<double> values);

    static ImageBuffer filled(std::size_t height, std::size_t width, double r, double g, double b);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }

    double at(std::size_t y, std::size_t x, std::size_t c) const { return values_[(y * width_ + x) * kChannels + c]; }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }

    bool operator==(const ImageBuffer&) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<double> values_;
};

/// Bilinear resampling with pixel-centre alignment; identity when sizes already match.
ImageBuffer resize_bilinear(const ImageBuffer& image, std::size_t height, std::size_t width);

/// Box-average downsampling to `cells` x `cells`; each cell averages the
/// source pixels whose index range maps onto it (at least one pixel).
std::vector<double> box_downsample(const ImageBuffer& image, std::size_t cells, std::size_t channel);

double max_abs_difference(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace toonfuse
