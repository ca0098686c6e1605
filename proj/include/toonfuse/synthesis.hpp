#pragma once

// Toy dual-path style-based generator.
//
// Layer k (0-based) runs at resolution 4 * 2^(k/2): two modulated 3x3
// convolutions per resolution, nearest 2x upsampling before every even layer
// after the first, and a 1x1 toRGB projection after the second layer of each
// resolution whose output is accumulated through upsampled skips. The final
// image is the logistic of the accumulated RGB.
//
// The dual forward adds, at every coarse layer (resolution <= 32), a second
// modulated convolution styled by the extrinsic codes and scaled by that
// layer's extrinsic-side control weight. Fine layers are styled by the fused
// latent row instead.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toonfuse/image.hpp"
#include "toonfuse/latent.hpp"
#include "toonfuse/tensor.hpp"

namespace toonfuse {

struct GeneratorConfig {
    std::uint32_t max_resolution = 64;
    std::uint32_t base_resolution = 4;
    std::uint32_t channel_base = 16;
    std::uint32_t channel_max = 32;
    std::uint32_t latent_dim = static_cast<std::uint32_t>(kDefaultLatentDim);
    std::uint64_t seed = 0;
    std::uint32_t coarse_max_resolution = 32;

    static constexpr std::uint32_t kChannelCap = 32;

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    /// L = 2 * (log2(max_resolution) - 1).
    std::size_t layer_count() const;
    std::uint32_t layer_resolution(std::size_t layer) const;
    bool is_coarse(std::size_t layer) const { return layer_resolution(layer) <= coarse_max_resolution; }
    std::size_t coarse_layer_count() const;
    std::uint32_t channels_at(std::uint32_t resolution) const;

    bool operator==(const GeneratorConfig&) const = default;
};

struct DenseParams {
    Tensor weight;  // [out, in]
    Tensor bias;    // [out]
    bool operator==(const DenseParams&) const = default;
};

/// Three dense layers with leaky activations between them (two hidden layers).
struct MlpParams {
    std::vector<DenseParams> layers;
    bool operator==(const MlpParams&) const = default;
};

/// Style affine (latent row -> per-input-channel scale, bias initialised to 1)
/// followed by a demodulated 3x3 convolution.
struct ModConvParams {
    DenseParams style;  // [c_in, D]
    Tensor weight;      // [c_out, c_in, 3, 3]
    Tensor bias;        // [c_out]
    bool operator==(const ModConvParams&) const = default;
};

struct ToRgbParams {
    Tensor weight;  // [3, c]
    Tensor bias;    // [3]
    bool operator==(const ToRgbParams&) const = default;
};

struct GeneratorParams {
    MlpParams mapping;    // f_in: Z -> W
    MlpParams extrinsic;  // f_ex: shared across rows of Z+
    Tensor const_input;   // [c0, 4, 4]
    std::vector<ModConvParams> layers;    // one per style layer
    std::vector<ToRgbParams> to_rgb;      // one per resolution
    std::vector<ModConvParams> residual;  // one per coarse layer

    bool operator==(const GeneratorParams&) const = default;
};

class Generator {
public:
    Generator(GeneratorConfig config, GeneratorParams params);

    const GeneratorConfig& config() const noexcept { return config_; }
    const GeneratorParams& params() const noexcept { return params_; }
    std::size_t layer_count() const noexcept { return params_.layers.size(); }
    std::size_t latent_dim() const noexcept { return config_.latent_dim; }

    /// Parameters in checkpoint order.
    TensorTable to_table() const;
    /// Consumes the generator's tensors from `table`; other entries are left in place.
    static Generator from_table(const GeneratorConfig& config, TensorTable& table);

private:
    GeneratorConfig config_;
    GeneratorParams params_;
};

Generator init_generator(const GeneratorConfig& config);

std::vector<double> map_z_to_w(const Generator& g, const LatentZ& z);
ExtrinsicCodes extrinsic_transform(const Generator& g, const LatentZPlus& z_ex);

/// What a single synthesis layer consumed.
struct LayerTap {
    std::size_t layer = 0;
    std::uint32_t resolution = 0;
    bool coarse = false;
    std::vector<double> style_row;
    std::vector<double> residual_row;  ///< empty unless the residual conv ran
    double residual_weight = 0.0;
};

ImageBuffer synthesize(const Generator& g, const LatentWPlus& w_plus, std::vector<LayerTap>* taps = nullptr);

ImageBuffer synthesize_dual(const Generator& g, const LatentWPlus& w_in, const ExtrinsicCodes& ex,
                            const ControlWeights& cw, std::vector<LayerTap>* taps = nullptr);

/// Mean squared pixel error between synthesize(g, w_plus) and target.
double reconstruction_loss(const Generator& g, const LatentWPlus& w_plus, const ImageBuffer& target);

struct LatentGradient {
    double loss = 0.0;  ///< already multiplied by loss_scale
    LatentWPlus gradient;
};

/// d/dw of loss_scale * mean((synthesize(g, w) - target)^2) by reverse accumulation.
LatentGradient latent_gradient(const Generator& g, const LatentWPlus& w_plus, const ImageBuffer& target,
                               double loss_scale = 1.0);

}  // namespace toonfuse
