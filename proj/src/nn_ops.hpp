#pragma once

// Kernels shared by the generator and the encoders. Feature maps are planar
// [C][H][W]. Every reduction runs in a fixed order so results are
// reproducible bit for bit.

#include <cstddef>
#include <span>
#include <vector>

#include "toonfuse/tensor.hpp"

namespace toonfuse::detail {

inline constexpr double kLeakySlope = 0.2;

struct FeatureMap {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(std::size_t c, std::size_t h, std::size_t w) : channels(c), height(h), width(w), data(c * h * w, 0.0) {}

    std::size_t plane() const noexcept { return height * width; }
    double* channel(std::size_t c) { return data.data() + c * plane(); }
    const double* channel(std::size_t c) const { return data.data() + c * plane(); }
};

inline double leaky(double v) { return v >= 0.0 ? v : kLeakySlope * v; }
inline double leaky_grad(double pre) { return pre >= 0.0 ? 1.0 : kLeakySlope; }

/// out_j = sum_i W[j,i] x_i + b_j, sum taken in ascending i.
void dense_forward(const Tensor& weight, const Tensor& bias, std::span<const double> x, std::span<double> out);

/// gx_i += sum_j W[j,i] g_j
void dense_backward_input(const Tensor& weight, std::span<const double> g, std::span<double> gx);

/// Zero-padded 3x3 correlation without bias: out[o] = sum_{i,kh,kw} W[o,i,kh,kw] * in[i] shifted.
FeatureMap conv3x3(const Tensor& weight, const FeatureMap& in);

/// Adjoint of conv3x3 with respect to its input.
FeatureMap conv3x3_transpose(const Tensor& weight, const FeatureMap& grad_out);

FeatureMap upsample2x(const FeatureMap& in);

/// Adjoint of nearest upsampling: each output pixel sums its 2x2 block.
FeatureMap downsample_sum2x(const FeatureMap& in);

/// 2x2 mean pooling (odd trailing rows/cols dropped).
FeatureMap avgpool2x(const FeatureMap& in);

/// Interleaved RGB image values -> planar feature map.
FeatureMap planar_from_rgb(std::span<const double> rgb, std::size_t height, std::size_t width);

}  // namespace toonfuse::detail
