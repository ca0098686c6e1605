#include "nn_ops.hpp"

#include <algorithm>

namespace toonfuse::detail {

void dense_forward(const Tensor& weight, const Tensor& bias, std::span<const double> x, std::span<double> out) {
    const std::size_t n_out = weight.dim(0);
    const std::size_t n_in = weight.dim(1);
    for (std::size_t j = 0; j < n_out; ++j) {
        const double* row = weight.data.data() + j * n_in;
        double acc = 0.0;
        for (std::size_t i = 0; i < n_in; ++i) acc += row[i] * x[i];
        out[j] = acc + bias.data[j];
    }
}

void dense_backward_input(const Tensor& weight, std::span<const double> g, std::span<double> gx) {
    const std::size_t n_out = weight.dim(0);
    const std::size_t n_in = weight.dim(1);
    for (std::size_t j = 0; j < n_out; ++j) {
        const double* row = weight.data.data() + j * n_in;
        const double gj = g[j];
        for (std::size_t i = 0; i < n_in; ++i) gx[i] += row[i] * gj;
    }
}

FeatureMap conv3x3(const Tensor& weight, const FeatureMap& in) {
    const std::size_t c_out = weight.dim(0);
    const std::size_t c_in = weight.dim(1);
    const std::size_t h = in.height;
    const std::size_t w = in.width;
    FeatureMap out(c_out, h, w);
    for (std::size_t o = 0; o < c_out; ++o) {
        double* dst = out.channel(o);
        for (std::size_t i = 0; i < c_in; ++i) {
            const double* src = in.channel(i);
            const double* k = weight.data.data() + (o * c_in + i) * 9;
            for (std::size_t kh = 0; kh < 3; ++kh) {
                for (std::size_t kw = 0; kw < 3; ++kw) {
                    const double wv = k[kh * 3 + kw];
                    // Output row y reads input row y + kh - 1.
                    const std::size_t y_lo = kh == 0 ? 1 : 0;
                    const std::size_t y_hi = kh == 2 ? h - 1 : h;
                    const std::size_t x_lo = kw == 0 ? 1 : 0;
                    const std::size_t x_hi = kw == 2 ? w - 1 : w;
                    for (std::size_t y = y_lo; y < y_hi; ++y) {
                        double* drow = dst + y * w;
                        const double* srow = src + (y + kh - 1) * w + (kw - 1);
                        for (std::size_t x = x_lo; x < x_hi; ++x) drow[x] += wv * srow[x];
                    }
                }
            }
        }
    }
    return out;
}

FeatureMap conv3x3_transpose(const Tensor& weight, const FeatureMap& grad_out) {
    const std::size_t c_out = weight.dim(0);
    const std::size_t c_in = weight.dim(1);
    const std::size_t h = grad_out.height;
    const std::size_t w = grad_out.width;
    FeatureMap gin(c_in, h, w);
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* g = grad_out.channel(o);
        for (std::size_t i = 0; i < c_in; ++i) {
            double* dst = gin.channel(i);
            const double* k = weight.data.data() + (o * c_in + i) * 9;
            for (std::size_t kh = 0; kh < 3; ++kh) {
                for (std::size_t kw = 0; kw < 3; ++kw) {
                    const double wv = k[kh * 3 + kw];
                    const std::size_t y_lo = kh == 0 ? 1 : 0;
                    const std::size_t y_hi = kh == 2 ? h - 1 : h;
                    const std::size_t x_lo = kw == 0 ? 1 : 0;
                    const std::size_t x_hi = kw == 2 ? w - 1 : w;
                    for (std::size_t y = y_lo; y < y_hi; ++y) {
                        const double* grow = g + y * w;
                        double* drow = dst + (y + kh - 1) * w + (kw - 1);
                        for (std::size_t x = x_lo; x < x_hi; ++x) drow[x] += wv * grow[x];
                    }
                }
            }
        }
    }
    return gin;
}

FeatureMap upsample2x(const FeatureMap& in) {
    FeatureMap out(in.channels, in.height * 2, in.width * 2);
    for (std::size_t c = 0; c < in.channels; ++c) {
        const double* src = in.channel(c);
        double* dst = out.channel(c);
        for (std::size_t y = 0; y < out.height; ++y) {
            for (std::size_t x = 0; x < out.width; ++x) dst[y * out.width + x] = src[(y / 2) * in.width + x / 2];
        }
    }
    return out;
}

FeatureMap downsample_sum2x(const FeatureMap& in) {
    FeatureMap out(in.channels, in.height / 2, in.width / 2);
    for (std::size_t c = 0; c < in.channels; ++c) {
        const double* src = in.channel(c);
        double* dst = out.channel(c);
        for (std::size_t y = 0; y < out.height; ++y) {
            for (std::size_t x = 0; x < out.width; ++x) {
                const double* p = src + 2 * y * in.width + 2 * x;
                dst[y * out.width + x] = p[0] + p[1] + p[in.width] + p[in.width + 1];
            }
        }
    }
    return out;
}

FeatureMap avgpool2x(const FeatureMap& in) {
    FeatureMap out = downsample_sum2x(in);
    for (double& v : out.data) v *= 0.25;
    return out;
}

FeatureMap planar_from_rgb(std::span<const double> rgb, std::size_t height, std::size_t width) {
    FeatureMap out(3, height, width);
    for (std::size_t p = 0; p < height * width; ++p) {
        for (std::size_t c = 0; c < 3; ++c) out.data[c * height * width + p] = rgb[p * 3 + c];
    }
    return out;
}

}  // namespace toonfuse::detail
