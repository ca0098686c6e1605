#pragma once

// Image-to-latent paths. Each encoder is a two-convolution network:
//   conv3x3 -> leaky -> 2x2 mean pool -> conv3x3 -> leaky -> global mean -> dense head (C -> L*D)
// The age encoder sees the RGB image plus a constant fourth plane holding age/100.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toonfuse/image.hpp"
#include "toonfuse/latent.hpp"
#include "toonfuse/synthesis.hpp"
#include "toonfuse/tensor.hpp"

namespace toonfuse {

inline constexpr std::uint32_t kDefaultEncoderChannels = 8;

struct ConvEncoderParams {
    Tensor conv1_weight;  // [C, c_in, 3, 3]
    Tensor conv1_bias;    // [C]
    Tensor conv2_weight;  // [C, C, 3, 3]
    Tensor conv2_bias;    // [C]
    DenseParams head;     // [L*D, C]

    std::size_t input_channels() const { return conv1_weight.dim(1); }
    std::size_t channels() const { return conv1_weight.dim(0); }

    bool operator==(const ConvEncoderParams&) const = default;
};

class EncoderSet {
public:
    EncoderSet(std::size_t input_resolution, std::size_t layers, std::size_t dim, ConvEncoderParams inv_wplus,
               ConvEncoderParams inv_zplus, std::optional<ConvEncoderParams> age, std::uint64_t seed);

    std::size_t input_resolution() const noexcept { return input_resolution_; }
    std::size_t layers() const noexcept { return layers_; }
    std::size_t dim() const noexcept { return dim_; }
    std::uint64_t seed() const noexcept { return seed_; }

    const ConvEncoderParams& inv_wplus() const noexcept { return inv_wplus_; }
    const ConvEncoderParams& inv_zplus() const noexcept { return inv_zplus_; }
    /// Absent when the age encoder is the null encoder (E_age := 0).
    const std::optional<ConvEncoderParams>& age() const noexcept { return age_; }
    bool null_age() const noexcept { return !age_.has_value(); }

    EncoderSet with_null_age() const;

    /// Tensors named under the "enc/" prefix.
    TensorTable to_table() const;
    static EncoderSet from_table(const GeneratorConfig& config, TensorTable& table);

private:
    std::size_t input_resolution_;
    std::size_t layers_;
    std::size_t dim_;
    ConvEncoderParams inv_wplus_;
    ConvEncoderParams inv_zplus_;
    std::optional<ConvEncoderParams> age_;
    std::uint64_t seed_;
};

/// Encoders paired with `config`, seeded from a stream derived from config.seed.
EncoderSet init_encoders(const GeneratorConfig& config, std::uint32_t channels = kDefaultEncoderChannels);

LatentWPlus encode_inv_wplus(const EncoderSet& e, const ImageBuffer& x);
LatentZPlus encode_inv_zplus(const EncoderSet& e, const ImageBuffer& s);

/// The age residual E_age(x, a) only; zero for the null age encoder.
LatentWPlus encode_age(const EncoderSet& e, const ImageBuffer& x, AgeValue a);

// ---- age estimation ----------------------------------------------------------

class AgeEstimator {
public:
    virtual ~AgeEstimator() = default;
    virtual std::string tag() const = 0;
    /// Must return a value in [0,100] and be deterministic.
    virtual AgeValue estimate(const ImageBuffer& image) const = 0;
};

/// 100 * logistic(bias + w . g), g = 16x16 box-averaged grayscale ((r+g+b)/3).
class LinearProbeAgeEstimator final : public AgeEstimator {
public:
    static constexpr std::size_t kGrid = 16;

    LinearProbeAgeEstimator(Tensor weight, Tensor bias);
    static LinearProbeAgeEstimator init(std::uint64_t seed);

    std::string tag() const override { return "linear-probe-16x16"; }
    AgeValue estimate(const ImageBuffer& image) const override;

    const Tensor& weight() const noexcept { return weight_; }  // [256]
    const Tensor& bias() const noexcept { return bias_; }      // [1]

    bool operator==(const LinearProbeAgeEstimator& o) const { return weight_ == o.weight_ && bias_ == o.bias_; }

private:
    Tensor weight_;
    Tensor bias_;
};

AgeValue estimate_age(const AgeEstimator& estimator, const ImageBuffer& reference);

/// Grayscale box-downsampled grid the linear probe reads.
std::vector<double> grayscale_grid(const ImageBuffer& image, std::size_t cells);

// ---- optimisation-based projection -------------------------------------------

struct ProjectionReport {
    LatentWPlus latent;
    std::vector<double> loss_trace;  ///< initial loss followed by one entry per accepted step
    std::size_t steps = 0;           ///< accepted steps
};

struct ProjectionOptions {
    std::size_t max_steps = 200;
    double step_size = 1.0;
    std::size_t max_backtracks = 40;
};

/// Gradient descent on the pixel MSE with step halving on rejection and step
/// doubling after each accepted step. Stops early when the loss reaches zero
/// or no step length in the backtracking budget decreases it.
ProjectionReport project_latent(const Generator& g, const ImageBuffer& target, const LatentWPlus& init,
                                const ProjectionOptions& options = {});

}  // namespace toonfuse
