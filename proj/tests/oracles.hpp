#pragma once

// Straight-line reference implementations used as test oracles. They read
// parameters through the public structs only and recompute everything with
// plain nested loops, one output element at a time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "toonfuse/encoders.hpp"
#include "toonfuse/image.hpp"
#include "toonfuse/latent.hpp"
#include "toonfuse/synthesis.hpp"

namespace oracle {

using Plane = std::vector<std::vector<double>>;  // [y][x]
using Maps = std::vector<Plane>;                 // [c][y][x]

// ---- random inputs --------------------------------------------------------------

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(rng, lo, hi);
    return v;
}

template <class Space>
toonfuse::LatentRows<Space> random_latent(std::mt19937_64& rng, std::size_t rows, std::size_t dim,
                                          double scale = 1.0) {
    return toonfuse::LatentRows<Space>(rows, dim, random_values(rng, rows * dim, -scale, scale));
}

inline toonfuse::ImageBuffer random_image(std::mt19937_64& rng, std::size_t h, std::size_t w) {
    return toonfuse::ImageBuffer(h, w, random_values(rng, h * w * 3, 0.0, 1.0));
}

/// Small configuration for exhaustive checks.
inline toonfuse::GeneratorConfig toy_config(std::uint32_t res, std::uint32_t dim, std::uint64_t seed,
                                            std::uint32_t channel_base = 2, std::uint32_t channel_max = 4) {
    toonfuse::GeneratorConfig c;
    c.max_resolution = res;
    c.latent_dim = dim;
    c.seed = seed;
    c.channel_base = channel_base;
    c.channel_max = channel_max;
    c.coarse_max_resolution = std::min<std::uint32_t>(32, res / 2);
    return c;
}

// ---- latent arithmetic ----------------------------------------------------------

/// Per-coordinate blend written from the convention definitions.
inline std::vector<double> fuse(const std::vector<double>& age, const std::vector<double>& ex,
                                const std::vector<double>& cw, std::size_t dim, toonfuse::Convention conv) {
    std::vector<double> out(age.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t k = i * dim + j;
            out[k] = conv == toonfuse::Convention::age ? cw[i] * age[k] + (1.0 - cw[i]) * ex[k]
                                                       : (1.0 - cw[i]) * age[k] + cw[i] * ex[k];
        }
    }
    return out;
}

// ---- layers -----------------------------------------------------------------------

inline double leaky(double v) { return v >= 0.0 ? v : 0.2 * v; }

inline std::vector<double> dense(const toonfuse::DenseParams& p, const std::vector<double>& x) {
    const std::size_t n_out = p.weight.shape[0];
    const std::size_t n_in = p.weight.shape[1];
    std::vector<double> y(n_out);
    for (std::size_t o = 0; o < n_out; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_in; ++i) acc += p.weight.data[o * n_in + i] * x[i];
        y[o] = acc + p.bias.data[o];
    }
    return y;
}

inline std::vector<double> mlp(const toonfuse::MlpParams& p, std::vector<double> x) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        x = dense(p.layers[l], x);
        if (l + 1 < p.layers.size()) {
            for (double& v : x) v = leaky(v);
        }
    }
    return x;
}

inline Maps zeros(std::size_t c, std::size_t h, std::size_t w) { return Maps(c, Plane(h, std::vector<double>(w, 0.0))); }

/// Zero-padded 3x3 correlation, summed over input channel then kernel row then column.
inline Maps conv3x3(const toonfuse::Tensor& weight, const Maps& x) {
    const std::size_t c_out = weight.shape[0];
    const std::size_t c_in = weight.shape[1];
    const std::size_t h = x[0].size();
    const std::size_t w = x[0][0].size();
    Maps y = zeros(c_out, h, w);
    for (std::size_t o = 0; o < c_out; ++o) {
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < w; ++c) {
                double acc = 0.0;
                for (std::size_t i = 0; i < c_in; ++i) {
                    for (int kh = 0; kh < 3; ++kh) {
                        for (int kw = 0; kw < 3; ++kw) {
                            const long yy = static_cast<long>(r) + kh - 1;
                            const long xx = static_cast<long>(c) + kw - 1;
                            if (yy < 0 || xx < 0 || yy >= static_cast<long>(h) || xx >= static_cast<long>(w)) continue;
                            acc += weight.data[((o * c_in + i) * 3 + kh) * 3 + kw] * x[i][yy][xx];
                        }
                    }
                }
                y[o][r][c] = acc;
            }
        }
    }
    return y;
}

inline Maps upsample(const Maps& x) {
    Maps y = zeros(x.size(), x[0].size() * 2, x[0][0].size() * 2);
    for (std::size_t c = 0; c < x.size(); ++c) {
        for (std::size_t r = 0; r < y[c].size(); ++r) {
            for (std::size_t q = 0; q < y[c][r].size(); ++q) y[c][r][q] = x[c][r / 2][q / 2];
        }
    }
    return y;
}

inline Maps modconv(const toonfuse::ModConvParams& p, const Maps& x, const std::vector<double>& row) {
    const std::size_t c_out = p.weight.shape[0];
    const std::size_t c_in = p.weight.shape[1];
    const std::vector<double> s = dense(p.style, row);
    Maps xs = x;
    for (std::size_t i = 0; i < c_in; ++i) {
        for (auto& line : xs[i]) {
            for (double& v : line) v *= s[i];
        }
    }
    Maps u = conv3x3(p.weight, xs);
    for (std::size_t o = 0; o < c_out; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < c_in; ++i) {
            double n = 0.0;
            for (std::size_t t = 0; t < 9; ++t) {
                const double k = p.weight.data[(o * c_in + i) * 9 + t];
                n += k * k;
            }
            acc += s[i] * s[i] * n;
        }
        const double d = 1.0 / std::sqrt(acc + 1e-8);
        for (auto& line : u[o]) {
            for (double& v : line) v = d * v + p.bias.data[o];
        }
    }
    return u;
}

inline Maps to_rgb(const toonfuse::ToRgbParams& p, const Maps& h) {
    const std::size_t c_in = p.weight.shape[1];
    Maps out = zeros(3, h[0].size(), h[0][0].size());
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t r = 0; r < h[0].size(); ++r) {
            for (std::size_t q = 0; q < h[0][0].size(); ++q) {
                double acc = 0.0;
                for (std::size_t i = 0; i < c_in; ++i) acc += p.weight.data[c * c_in + i] * h[i][r][q];
                out[c][r][q] = acc + p.bias.data[c];
            }
        }
    }
    return out;
}

/// One synthesis layer's inputs: style row, optional residual row and weight.
struct LayerInput {
    std::vector<double> style;
    std::vector<double> residual;
    double beta = 0.0;
};

inline toonfuse::ImageBuffer synthesize(const toonfuse::Generator& g, const std::vector<LayerInput>& layers) {
    const auto& p = g.params();
    const std::size_t c0 = p.const_input.shape[0];
    Maps h = zeros(c0, 4, 4);
    for (std::size_t c = 0; c < c0; ++c) {
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t q = 0; q < 4; ++q) h[c][r][q] = p.const_input.data[(c * 4 + r) * 4 + q];
        }
    }
    Maps rgb;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Maps x = (k > 0 && k % 2 == 0) ? upsample(h) : h;
        Maps y = modconv(p.layers[k], x, layers[k].style);
        if (!layers[k].residual.empty()) {
            const Maps r = modconv(p.residual[k], x, layers[k].residual);
            for (std::size_t c = 0; c < y.size(); ++c) {
                for (std::size_t a = 0; a < y[c].size(); ++a) {
                    for (std::size_t b = 0; b < y[c][a].size(); ++b) y[c][a][b] = y[c][a][b] + layers[k].beta * r[c][a][b];
                }
            }
        }
        for (auto& ch : y) {
            for (auto& line : ch) {
                for (double& v : line) v = leaky(v);
            }
        }
        h = y;
        if (k % 2 == 1) {
            const Maps fresh = to_rgb(p.to_rgb[k / 2], h);
            if (k == 1) {
                rgb = fresh;
            } else {
                Maps up = upsample(rgb);
                for (std::size_t c = 0; c < 3; ++c) {
                    for (std::size_t a = 0; a < up[c].size(); ++a) {
                        for (std::size_t b = 0; b < up[c][a].size(); ++b) up[c][a][b] = up[c][a][b] + fresh[c][a][b];
                    }
                }
                rgb = up;
            }
        }
    }
    const std::size_t res = rgb[0].size();
    std::vector<double> px(res * res * 3);
    for (std::size_t r = 0; r < res; ++r) {
        for (std::size_t q = 0; q < res; ++q) {
            for (std::size_t c = 0; c < 3; ++c) {
                px[(r * res + q) * 3 + c] = std::clamp(1.0 / (1.0 + std::exp(-rgb[c][r][q])), 0.0, 1.0);
            }
        }
    }
    return toonfuse::ImageBuffer(res, res, std::move(px));
}

inline std::vector<double> row_of(const std::vector<double>& v, std::size_t i, std::size_t dim) {
    return {v.begin() + static_cast<std::ptrdiff_t>(i * dim), v.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim)};
}

/// Dual forward composed from its definition: coarse layers get the intrinsic
/// row plus a weighted residual conv on the extrinsic row, fine layers the
/// fused row.
inline toonfuse::ImageBuffer synthesize_dual(const toonfuse::Generator& g, const toonfuse::LatentWPlus& w_in,
                                             const toonfuse::LatentWPlus& ex, const toonfuse::ControlWeights& cw) {
    const auto& cfg = g.config();
    const std::size_t dim = w_in.dim();
    const std::vector<double> in(w_in.values().begin(), w_in.values().end());
    const std::vector<double> e(ex.values().begin(), ex.values().end());
    std::vector<LayerInput> layers(w_in.rows());
    for (std::size_t k = 0; k < w_in.rows(); ++k) {
        const double beta = cw.convention() == toonfuse::Convention::extrinsic ? cw[k] : 1.0 - cw[k];
        if (cfg.layer_resolution(k) <= cfg.coarse_max_resolution) {
            layers[k].style = row_of(in, k, dim);
            if (beta != 0.0) {
                layers[k].residual = row_of(e, k, dim);
                layers[k].beta = beta;
            }
        } else {
            const std::vector<double> one{cw[k]};
            layers[k].style = fuse(row_of(in, k, dim), row_of(e, k, dim), one, dim, cw.convention());
        }
    }
    return synthesize(g, layers);
}

inline toonfuse::ImageBuffer synthesize(const toonfuse::Generator& g, const toonfuse::LatentWPlus& w) {
    const std::vector<double> v(w.values().begin(), w.values().end());
    std::vector<LayerInput> layers(w.rows());
    for (std::size_t k = 0; k < w.rows(); ++k) layers[k].style = row_of(v, k, w.dim());
    return synthesize(g, layers);
}

// ---- encoders ---------------------------------------------------------------------

inline Maps planes(const toonfuse::ImageBuffer& img) {
    Maps m = zeros(3, img.height(), img.width());
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t r = 0; r < img.height(); ++r) {
            for (std::size_t q = 0; q < img.width(); ++q) m[c][r][q] = img.at(r, q, c);
        }
    }
    return m;
}

inline std::vector<double> encoder(const toonfuse::ConvEncoderParams& p, const Maps& x) {
    Maps a = conv3x3(p.conv1_weight, x);
    for (std::size_t c = 0; c < a.size(); ++c) {
        for (auto& line : a[c]) {
            for (double& v : line) v = leaky(v + p.conv1_bias.data[c]);
        }
    }
    const std::size_t h = a[0].size() / 2;
    const std::size_t w = a[0][0].size() / 2;
    Maps pooled = zeros(a.size(), h, w);
    for (std::size_t c = 0; c < a.size(); ++c) {
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t q = 0; q < w; ++q) {
                pooled[c][r][q] =
                    (a[c][2 * r][2 * q] + a[c][2 * r][2 * q + 1] + a[c][2 * r + 1][2 * q] + a[c][2 * r + 1][2 * q + 1]) *
                    0.25;
            }
        }
    }
    Maps b = conv3x3(p.conv2_weight, pooled);
    std::vector<double> feat(b.size());
    for (std::size_t c = 0; c < b.size(); ++c) {
        double acc = 0.0;
        for (auto& line : b[c]) {
            for (double& v : line) {
                v = leaky(v + p.conv2_bias.data[c]);
                acc += v;
            }
        }
        feat[c] = acc / static_cast<double>(h * w);
    }
    return dense(p.head, feat);
}

inline double probe_age(const toonfuse::LinearProbeAgeEstimator& est, const toonfuse::ImageBuffer& img) {
    const std::size_t h = img.height();
    const std::size_t w = img.width();
    double acc = 0.0;
    for (std::size_t u = 0; u < 16; ++u) {
        for (std::size_t v = 0; v < 16; ++v) {
            const std::size_t y0 = std::min(u * h / 16, h - 1), y1 = std::max(y0 + 1, (u + 1) * h / 16);
            const std::size_t x0 = std::min(v * w / 16, w - 1), x1 = std::max(x0 + 1, (v + 1) * w / 16);
            double sum = 0.0;
            for (std::size_t y = y0; y < y1; ++y) {
                for (std::size_t x = x0; x < x1; ++x) {
                    sum += (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
                }
            }
            acc += est.weight().data[u * 16 + v] * (sum / static_cast<double>((y1 - y0) * (x1 - x0)));
        }
    }
    return std::clamp(100.0 / (1.0 + std::exp(-(acc + est.bias().data[0]))), 0.0, 100.0);
}

}  // namespace oracle

namespace oracle {

struct GradCheck {
    double max_rel_error = 0.0;
    double max_abs_gradient = 0.0;
};

/// Central differences of reconstruction_loss against latent_gradient.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheck gradient_check(const toonfuse::Generator& g, const toonfuse::LatentWPlus& w,
                                const toonfuse::ImageBuffer& target, double h = 1e-6, double floor = 1e-7) {
    const auto analytic = toonfuse::latent_gradient(g, w, target).gradient;
    GradCheck out;
    std::vector<double> v(w.values().begin(), w.values().end());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double keep = v[k];
        v[k] = keep + h;
        const double up = toonfuse::reconstruction_loss(g, toonfuse::LatentWPlus(w.rows(), w.dim(), v), target);
        v[k] = keep - h;
        const double down = toonfuse::reconstruction_loss(g, toonfuse::LatentWPlus(w.rows(), w.dim(), v), target);
        v[k] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic.values()[k];
        const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
        out.max_rel_error = std::max(out.max_rel_error, rel);
        out.max_abs_gradient = std::max(out.max_abs_gradient, std::abs(a));
    }
    return out;
}

}  // namespace oracle
