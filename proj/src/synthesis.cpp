#include "toonfuse/synthesis.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "nn_ops.hpp"
#include "toonfuse/rng.hpp"

namespace toonfuse {

using detail::FeatureMap;

namespace {

constexpr double kDemodEps = 1e-8;

bool power_of_two(std::uint32_t v) { return v != 0 && std::has_single_bit(v); }

}  // namespace

void GeneratorConfig::validate() const {
    if (!power_of_two(max_resolution) || max_resolution < 8 || max_resolution > 1024) {
        throw ValidationError("max_resolution",
                              "must be a power of two in [8,1024], got " + std::to_string(max_resolution));
    }
    if (base_resolution != 4) throw ValidationError("base_resolution", "must be 4");
    if (channel_base < 1) throw ValidationError("channel_base", "must be at least 1");
    if (channel_max < channel_base) {
        throw ValidationError("channel_max", "must be >= channel_base (" + std::to_string(channel_base) + "), got " +
                                                 std::to_string(channel_max));
    }
    if (latent_dim < 1) throw ValidationError("latent_dim", "must be at least 1");
    if (!power_of_two(coarse_max_resolution) || coarse_max_resolution < 4) {
        throw ValidationError("coarse_max_resolution", "must be a power of two >= 4");
    }
}

std::size_t GeneratorConfig::layer_count() const {
    return 2 * (static_cast<std::size_t>(std::bit_width(max_resolution)) - 2);
}

std::uint32_t GeneratorConfig::layer_resolution(std::size_t layer) const {
    return base_resolution << (layer / 2);
}

std::size_t GeneratorConfig::coarse_layer_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < layer_count(); ++k) n += is_coarse(k) ? 1 : 0;
    return n;
}

std::uint32_t GeneratorConfig::channels_at(std::uint32_t resolution) const {
    const std::uint64_t scheduled = std::uint64_t{channel_base} * 1024 / resolution;
    std::uint64_t c = std::min<std::uint64_t>({channel_max, scheduled, kChannelCap});
    return static_cast<std::uint32_t>(std::max<std::uint64_t>(c, 1));
}

Generator::Generator(GeneratorConfig config, GeneratorParams params)
    : config_(std::move(config)), params_(std::move(params)) {
    config_.validate();
    if (params_.layers.size() != config_.layer_count()) throw DimensionError("generator: layer count mismatch");
    if (params_.residual.size() != config_.coarse_layer_count()) {
        throw DimensionError("generator: residual block count mismatch");
    }
}

namespace {

// ---- parameter layout ------------------------------------------------------

struct Shapes {
    std::size_t layers;
    std::uint32_t dim;
    std::vector<std::uint32_t> c_in;
    std::vector<std::uint32_t> c_out;
};

Shapes layer_shapes(const GeneratorConfig& cfg) {
    Shapes s{cfg.layer_count(), cfg.latent_dim, {}, {}};
    std::uint32_t prev = cfg.channels_at(cfg.base_resolution);
    for (std::size_t k = 0; k < s.layers; ++k) {
        const std::uint32_t c = cfg.channels_at(cfg.layer_resolution(k));
        s.c_in.push_back(prev);
        s.c_out.push_back(c);
        prev = c;
    }
    return s;
}

DenseParams init_dense(std::uint32_t out, std::uint32_t in, double bias, Rng& rng) {
    return {fan_in_normal({out, in}, in, rng), constant_tensor({out}, bias)};
}

MlpParams init_mlp(std::uint32_t dim, Rng& rng) {
    MlpParams mlp;
    for (int i = 0; i < 3; ++i) mlp.layers.push_back(init_dense(dim, dim, 0.0, rng));
    return mlp;
}

ModConvParams init_modconv(std::uint32_t c_out, std::uint32_t c_in, std::uint32_t dim, Rng& rng) {
    ModConvParams p;
    p.style = init_dense(c_in, dim, 1.0, rng);
    p.weight = fan_in_normal({c_out, c_in, 3, 3}, std::size_t{c_in} * 9, rng);
    p.bias = constant_tensor({c_out}, 0.0);
    return p;
}

void push_dense(TensorTable& t, const std::string& prefix, const DenseParams& d) {
    t.emplace_back(prefix + ".weight", d.weight);
    t.emplace_back(prefix + ".bias", d.bias);
}

void push_modconv(TensorTable& t, const std::string& prefix, const ModConvParams& p) {
    push_dense(t, prefix + ".style", p.style);
    t.emplace_back(prefix + ".weight", p.weight);
    t.emplace_back(prefix + ".bias", p.bias);
}

DenseParams take_dense(TensorTable& t, const std::string& prefix, std::uint32_t out, std::uint32_t in) {
    DenseParams d;
    d.weight = take_tensor(t, prefix + ".weight", {out, in});
    d.bias = take_tensor(t, prefix + ".bias", {out});
    return d;
}

ModConvParams take_modconv(TensorTable& t, const std::string& prefix, std::uint32_t c_out, std::uint32_t c_in,
                           std::uint32_t dim) {
    ModConvParams p;
    p.style = take_dense(t, prefix + ".style", c_in, dim);
    p.weight = take_tensor(t, prefix + ".weight", {c_out, c_in, 3, 3});
    p.bias = take_tensor(t, prefix + ".bias", {c_out});
    return p;
}

}  // namespace

Generator init_generator(const GeneratorConfig& config) {
    config.validate();
    const Shapes shapes = layer_shapes(config);
    Rng rng(config.seed);
    GeneratorParams p;
    p.mapping = init_mlp(config.latent_dim, rng);
    p.extrinsic = init_mlp(config.latent_dim, rng);
    const std::uint32_t c0 = shapes.c_in[0];
    p.const_input = fan_in_normal({c0, config.base_resolution, config.base_resolution}, 1, rng);
    for (std::size_t k = 0; k < shapes.layers; ++k) {
        p.layers.push_back(init_modconv(shapes.c_out[k], shapes.c_in[k], config.latent_dim, rng));
    }
    for (std::size_t k = 1; k < shapes.layers; k += 2) {
        p.to_rgb.push_back({fan_in_normal({3, shapes.c_out[k]}, shapes.c_out[k], rng), constant_tensor({3}, 0.0)});
    }
    for (std::size_t k = 0; k < shapes.layers; ++k) {
        if (!config.is_coarse(k)) continue;
        p.residual.push_back(init_modconv(shapes.c_out[k], shapes.c_in[k], config.latent_dim, rng));
    }
    return Generator(config, std::move(p));
}

TensorTable Generator::to_table() const {
    TensorTable t;
    for (std::size_t i = 0; i < params_.mapping.layers.size(); ++i) {
        push_dense(t, "mapping." + std::to_string(i), params_.mapping.layers[i]);
    }
    for (std::size_t i = 0; i < params_.extrinsic.layers.size(); ++i) {
        push_dense(t, "extrinsic." + std::to_string(i), params_.extrinsic.layers[i]);
    }
    t.emplace_back("const", params_.const_input);
    for (std::size_t k = 0; k < params_.layers.size(); ++k) {
        push_modconv(t, "layers." + std::to_string(k), params_.layers[k]);
    }
    for (std::size_t r = 0; r < params_.to_rgb.size(); ++r) {
        t.emplace_back("to_rgb." + std::to_string(r) + ".weight", params_.to_rgb[r].weight);
        t.emplace_back("to_rgb." + std::to_string(r) + ".bias", params_.to_rgb[r].bias);
    }
    for (std::size_t r = 0; r < params_.residual.size(); ++r) {
        push_modconv(t, "residual." + std::to_string(r), params_.residual[r]);
    }
    return t;
}

Generator Generator::from_table(const GeneratorConfig& config, TensorTable& table) {
    config.validate();
    const Shapes shapes = layer_shapes(config);
    const std::uint32_t dim = config.latent_dim;
    GeneratorParams p;
    for (int i = 0; i < 3; ++i) p.mapping.layers.push_back(take_dense(table, "mapping." + std::to_string(i), dim, dim));
    for (int i = 0; i < 3; ++i) {
        p.extrinsic.layers.push_back(take_dense(table, "extrinsic." + std::to_string(i), dim, dim));
    }
    p.const_input = take_tensor(table, "const", {shapes.c_in[0], config.base_resolution, config.base_resolution});
    for (std::size_t k = 0; k < shapes.layers; ++k) {
        p.layers.push_back(take_modconv(table, "layers." + std::to_string(k), shapes.c_out[k], shapes.c_in[k], dim));
    }
    for (std::size_t k = 1, r = 0; k < shapes.layers; k += 2, ++r) {
        ToRgbParams rgb;
        rgb.weight = take_tensor(table, "to_rgb." + std::to_string(r) + ".weight", {3, shapes.c_out[k]});
        rgb.bias = take_tensor(table, "to_rgb." + std::to_string(r) + ".bias", {3});
        p.to_rgb.push_back(std::move(rgb));
    }
    for (std::size_t k = 0, r = 0; k < shapes.layers; ++k) {
        if (!config.is_coarse(k)) continue;
        p.residual.push_back(take_modconv(table, "residual." + std::to_string(r++), shapes.c_out[k], shapes.c_in[k], dim));
    }
    return Generator(config, std::move(p));
}

// ---- mapping networks -------------------------------------------------------

namespace {

std::vector<double> mlp_forward(const MlpParams& mlp, std::span<const double> x) {
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
        std::vector<double> next(mlp.layers[l].weight.dim(0));
        detail::dense_forward(mlp.layers[l].weight, mlp.layers[l].bias, cur, next);
        if (l + 1 < mlp.layers.size()) {
            for (double& v : next) v = detail::leaky(v);
        }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

std::vector<double> map_z_to_w(const Generator& g, const LatentZ& z) {
    if (z.dim() != g.latent_dim()) {
        throw DimensionError("map_z_to_w: z has length " + std::to_string(z.dim()) + ", expected " +
                             std::to_string(g.latent_dim()));
    }
    return mlp_forward(g.params().mapping, z.values());
}

ExtrinsicCodes extrinsic_transform(const Generator& g, const LatentZPlus& z_ex) {
    if (z_ex.rows() != g.layer_count() || z_ex.dim() != g.latent_dim()) {
        throw DimensionError("extrinsic_transform: expected " + std::to_string(g.layer_count()) + "x" +
                             std::to_string(g.latent_dim()) + " input");
    }
    std::vector<double> out;
    out.reserve(z_ex.values().size());
    for (std::size_t i = 0; i < z_ex.rows(); ++i) {
        const auto row = mlp_forward(g.params().extrinsic, z_ex.row(i));
        out.insert(out.end(), row.begin(), row.end());
    }
    return ExtrinsicCodes(z_ex.rows(), z_ex.dim(), std::move(out));
}

// ---- synthesis forward / backward --------------------------------------------

namespace {

struct ModConvCache {
    FeatureMap input;
    std::vector<double> style;
    std::vector<double> demod;
    FeatureMap conv;  // before demodulation and bias
};

struct LayerCache {
    ModConvCache main;
    FeatureMap pre_activation;
};

struct LayerPlan {
    std::span<const double> style_row;
    std::span<const double> residual_row;
    double residual_weight = 0.0;
    bool residual = false;
};

// Sum over the 3x3 kernel of squared weights, per (o, i).
std::vector<double> kernel_norms(const Tensor& weight) {
    const std::size_t n = weight.dim(0) * weight.dim(1);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < 9; ++t) acc += weight.data[k * 9 + t] * weight.data[k * 9 + t];
        out[k] = acc;
    }
    return out;
}

FeatureMap modconv_forward(const ModConvParams& p, const FeatureMap& x, std::span<const double> row,
                           ModConvCache* cache) {
    const std::size_t c_in = p.weight.dim(1);
    const std::size_t c_out = p.weight.dim(0);
    std::vector<double> style(c_in);
    detail::dense_forward(p.style.weight, p.style.bias, row, style);

    FeatureMap scaled = x;
    for (std::size_t i = 0; i < c_in; ++i) {
        double* ch = scaled.channel(i);
        for (std::size_t q = 0; q < scaled.plane(); ++q) ch[q] *= style[i];
    }
    FeatureMap conv = detail::conv3x3(p.weight, scaled);

    const auto norms = kernel_norms(p.weight);
    std::vector<double> demod(c_out);
    for (std::size_t o = 0; o < c_out; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < c_in; ++i) acc += style[i] * style[i] * norms[o * c_in + i];
        demod[o] = 1.0 / std::sqrt(acc + kDemodEps);
    }

    FeatureMap y(c_out, x.height, x.width);
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* u = conv.channel(o);
        double* dst = y.channel(o);
        for (std::size_t q = 0; q < y.plane(); ++q) dst[q] = demod[o] * u[q] + p.bias.data[o];
    }
    if (cache) {
        cache->input = x;
        cache->style = std::move(style);
        cache->demod = std::move(demod);
        cache->conv = std::move(conv);
    }
    return y;
}

// Returns the gradient with respect to the layer input; accumulates the
// latent-row gradient into `grad_row`.
FeatureMap modconv_backward(const ModConvParams& p, const ModConvCache& cache, const FeatureMap& grad_y,
                            std::span<double> grad_row) {
    const std::size_t c_in = p.weight.dim(1);
    const std::size_t c_out = p.weight.dim(0);
    const std::size_t plane = grad_y.plane();

    FeatureMap grad_conv(c_out, grad_y.height, grad_y.width);
    std::vector<double> grad_demod(c_out, 0.0);
    for (std::size_t o = 0; o < c_out; ++o) {
        const double* gy = grad_y.channel(o);
        const double* u = cache.conv.channel(o);
        double* gu = grad_conv.channel(o);
        double acc = 0.0;
        for (std::size_t q = 0; q < plane; ++q) {
            gu[q] = cache.demod[o] * gy[q];
            acc += gy[q] * u[q];
        }
        grad_demod[o] = acc;
    }

    FeatureMap grad_scaled = detail::conv3x3_transpose(p.weight, grad_conv);
    const auto norms = kernel_norms(p.weight);

    std::vector<double> grad_style(c_in, 0.0);
    FeatureMap grad_x(c_in, grad_y.height, grad_y.width);
    for (std::size_t i = 0; i < c_in; ++i) {
        const double* gxs = grad_scaled.channel(i);
        const double* x = cache.input.channel(i);
        double* gx = grad_x.channel(i);
        double acc = 0.0;
        for (std::size_t q = 0; q < plane; ++q) {
            acc += gxs[q] * x[q];
            gx[q] = cache.style[i] * gxs[q];
        }
        // d(demod_o)/d(style_i) = -demod_o^3 * style_i * norm_oi
        for (std::size_t o = 0; o < c_out; ++o) {
            const double d = cache.demod[o];
            acc -= grad_demod[o] * d * d * d * cache.style[i] * norms[o * c_in + i];
        }
        grad_style[i] = acc;
    }
    detail::dense_backward_input(p.style.weight, grad_style, grad_row);
    return grad_x;
}

void check_finite(const FeatureMap& m, std::size_t layer) {
    for (double v : m.data) {
        if (!std::isfinite(v)) throw NumericError("synthesis: non-finite activation at layer " + std::to_string(layer + 1));
    }
}

// toRGB projection: out_c = sum_i W[c,i] h_i + b_c.
FeatureMap to_rgb_forward(const ToRgbParams& p, const FeatureMap& h) {
    const std::size_t c_in = p.weight.dim(1);
    FeatureMap out(3, h.height, h.width);
    for (std::size_t c = 0; c < 3; ++c) {
        double* dst = out.channel(c);
        for (std::size_t i = 0; i < c_in; ++i) {
            const double w = p.weight.data[c * c_in + i];
            const double* src = h.channel(i);
            for (std::size_t q = 0; q < out.plane(); ++q) dst[q] += w * src[q];
        }
        for (std::size_t q = 0; q < out.plane(); ++q) dst[q] += p.bias.data[c];
    }
    return out;
}

void to_rgb_backward(const ToRgbParams& p, const FeatureMap& grad_rgb, FeatureMap& grad_h) {
    const std::size_t c_in = p.weight.dim(1);
    for (std::size_t c = 0; c < 3; ++c) {
        const double* g = grad_rgb.channel(c);
        for (std::size_t i = 0; i < c_in; ++i) {
            const double w = p.weight.data[c * c_in + i];
            double* dst = grad_h.channel(i);
            for (std::size_t q = 0; q < grad_h.plane(); ++q) dst[q] += w * g[q];
        }
    }
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct ForwardOutput {
    ImageBuffer image;
    std::vector<LayerCache> caches;
};

ForwardOutput run_forward(const Generator& g, const std::vector<LayerPlan>& plan, bool keep_cache,
                          std::vector<LayerTap>* taps) {
    const auto& cfg = g.config();
    const auto& p = g.params();
    const std::size_t layers = g.layer_count();

    ForwardOutput result;
    if (keep_cache) result.caches.resize(layers);
    if (taps) taps->clear();

    FeatureMap h;
    h.channels = p.const_input.dim(0);
    h.height = cfg.base_resolution;
    h.width = cfg.base_resolution;
    h.data = p.const_input.data;

    FeatureMap rgb;
    for (std::size_t k = 0; k < layers; ++k) {
        const LayerPlan& lp = plan[k];
        FeatureMap x = (k > 0 && k % 2 == 0) ? detail::upsample2x(h) : std::move(h);

        ModConvCache* cache = keep_cache ? &result.caches[k].main : nullptr;
        FeatureMap y = modconv_forward(p.layers[k], x, lp.style_row, cache);
        if (lp.residual) {
            const FeatureMap r = modconv_forward(p.residual[k], x, lp.residual_row, nullptr);
            for (std::size_t q = 0; q < y.data.size(); ++q) y.data[q] = y.data[q] + lp.residual_weight * r.data[q];
        }
        check_finite(y, k);

        h = y;
        for (double& v : h.data) v = detail::leaky(v);
        if (keep_cache) result.caches[k].pre_activation = std::move(y);

        if (k % 2 == 1) {
            FeatureMap fresh = to_rgb_forward(p.to_rgb[k / 2], h);
            if (k == 1) {
                rgb = std::move(fresh);
            } else {
                FeatureMap up = detail::upsample2x(rgb);
                for (std::size_t q = 0; q < up.data.size(); ++q) up.data[q] = up.data[q] + fresh.data[q];
                rgb = std::move(up);
            }
            check_finite(rgb, k);
        }

        if (taps) {
            LayerTap tap;
            tap.layer = k;
            tap.resolution = cfg.layer_resolution(k);
            tap.coarse = cfg.is_coarse(k);
            tap.style_row.assign(lp.style_row.begin(), lp.style_row.end());
            if (lp.residual) tap.residual_row.assign(lp.residual_row.begin(), lp.residual_row.end());
            tap.residual_weight = lp.residual ? lp.residual_weight : 0.0;
            taps->push_back(std::move(tap));
        }
    }

    const std::size_t height = rgb.height;
    const std::size_t width = rgb.width;
    std::vector<double> pixels(height * width * 3);
    for (std::size_t c = 0; c < 3; ++c) {
        const double* src = rgb.channel(c);
        for (std::size_t q = 0; q < rgb.plane(); ++q) pixels[q * 3 + c] = logistic(src[q]);
    }
    result.image = ImageBuffer::clamped(height, width, std::move(pixels));
    return result;
}

void check_wplus(const Generator& g, const LatentWPlus& w, const char* what) {
    if (w.rows() != g.layer_count() || w.dim() != g.latent_dim()) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(g.layer_count()) + "x" +
                             std::to_string(g.latent_dim()) + " latent, got " + std::to_string(w.rows()) + "x" +
                             std::to_string(w.dim()));
    }
}

std::vector<LayerPlan> plain_plan(const LatentWPlus& w) {
    std::vector<LayerPlan> plan(w.rows());
    for (std::size_t k = 0; k < w.rows(); ++k) plan[k].style_row = w.row(k);
    return plan;
}

void check_target(const Generator& g, const ImageBuffer& target) {
    const std::size_t r = g.config().max_resolution;
    if (target.height() != r || target.width() != r) {
        throw DimensionError("target image is " + std::to_string(target.height()) + "x" +
                             std::to_string(target.width()) + ", generator emits " + std::to_string(r) + "x" +
                             std::to_string(r));
    }
}

double mean_squared_error(const ImageBuffer& a, const ImageBuffer& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a.values()[k] - b.values()[k];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace

ImageBuffer synthesize(const Generator& g, const LatentWPlus& w_plus, std::vector<LayerTap>* taps) {
    check_wplus(g, w_plus, "synthesize");
    return run_forward(g, plain_plan(w_plus), false, taps).image;
}

ImageBuffer synthesize_dual(const Generator& g, const LatentWPlus& w_in, const ExtrinsicCodes& ex,
                            const ControlWeights& cw, std::vector<LayerTap>* taps) {
    check_wplus(g, w_in, "synthesize_dual (intrinsic)");
    check_wplus(g, ex, "synthesize_dual (extrinsic)");
    if (cw.size() != g.layer_count()) {
        throw ValidationError("control_weights", "expected " + std::to_string(g.layer_count()) + " layers, got " +
                                                     std::to_string(cw.size()));
    }
    const auto& cfg = g.config();
    const std::size_t dim = g.latent_dim();
    std::vector<double> fused(w_in.values().size());
    std::vector<LayerPlan> plan(g.layer_count());
    for (std::size_t k = 0; k < g.layer_count(); ++k) {
        if (cfg.is_coarse(k)) {
            plan[k].style_row = w_in.row(k);
            const double beta = cw.extrinsic_weight(k);
            if (beta != 0.0) {
                plan[k].residual = true;
                plan[k].residual_row = ex.row(k);
                plan[k].residual_weight = beta;
            }
        } else {
            std::span<double> out(fused.data() + k * dim, dim);
            fuse_row(w_in.row(k), ex.row(k), cw[k], cw.convention(), out);
            plan[k].style_row = out;
        }
    }
    return run_forward(g, plan, false, taps).image;
}

double reconstruction_loss(const Generator& g, const LatentWPlus& w_plus, const ImageBuffer& target) {
    check_target(g, target);
    return mean_squared_error(synthesize(g, w_plus), target);
}

LatentGradient latent_gradient(const Generator& g, const LatentWPlus& w_plus, const ImageBuffer& target,
                               double loss_scale) {
    check_wplus(g, w_plus, "latent_gradient");
    check_target(g, target);
    const auto& p = g.params();
    const std::size_t layers = g.layer_count();
    const std::size_t dim = g.latent_dim();

    ForwardOutput fwd = run_forward(g, plain_plan(w_plus), true, nullptr);
    const ImageBuffer& image = fwd.image;
    const double loss = loss_scale * mean_squared_error(image, target);
    if (!std::isfinite(loss)) throw NumericError("latent_gradient: non-finite loss");

    const std::size_t res = image.height();
    const double coef = 2.0 * loss_scale / static_cast<double>(image.size());
    FeatureMap grad_rgb(3, res, image.width());
    for (std::size_t q = 0; q < res * image.width(); ++q) {
        for (std::size_t c = 0; c < 3; ++c) {
            const double v = image.values()[q * 3 + c];
            const double gimg = coef * (v - target.values()[q * 3 + c]);
            grad_rgb.data[c * grad_rgb.plane() + q] = gimg * v * (1.0 - v);
        }
    }

    std::vector<double> grad(layers * dim, 0.0);
    FeatureMap grad_h;  // gradient w.r.t. the output of layer k
    for (std::size_t kk = layers; kk-- > 0;) {
        const LayerCache& cache = fwd.caches[kk];
        const FeatureMap& pre = cache.pre_activation;
        if (grad_h.data.empty()) grad_h = FeatureMap(pre.channels, pre.height, pre.width);

        if (kk % 2 == 1) {
            to_rgb_backward(p.to_rgb[kk / 2], grad_rgb, grad_h);
            if (kk > 1) grad_rgb = detail::downsample_sum2x(grad_rgb);
        }

        FeatureMap grad_y = std::move(grad_h);
        for (std::size_t q = 0; q < grad_y.data.size(); ++q) grad_y.data[q] *= detail::leaky_grad(pre.data[q]);

        std::span<double> grad_row(grad.data() + kk * dim, dim);
        FeatureMap grad_x = modconv_backward(p.layers[kk], cache.main, grad_y, grad_row);
        grad_h = (kk > 0 && kk % 2 == 0) ? detail::downsample_sum2x(grad_x) : std::move(grad_x);
    }

    for (double v : grad) {
        if (!std::isfinite(v)) throw NumericError("latent_gradient: non-finite gradient");
    }
    return {loss, LatentWPlus(layers, dim, std::move(grad))};
}

}  // namespace toonfuse
