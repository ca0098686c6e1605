#pragma once

// End-to-end compositions: re-aging, dual-path style transfer, the combined
// re-aging + style transfer, random generation, style/age grids, control
// sweeps and per-frame batch processing.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "toonfuse/encoders.hpp"
#include "toonfuse/image.hpp"
#include "toonfuse/latent.hpp"
#include "toonfuse/synthesis.hpp"

namespace toonfuse {

/// Inputs for one combined re-aging + style transfer run.
///
/// The age comes from `target_age`, or from `age_reference` through the age
/// estimator. Supplying both is an error unless `prefer_reference` is set.
/// `adaptive` rescales the resolved age by the coarse control weights.
///
/// The override slots take precomputed latents in place of encoder outputs:
/// `reconstruction_override` replaces E_inv(x), `style_latent_override`
/// replaces the Z+ style code and `extrinsic_override` replaces the whole
/// extrinsic path output.
struct ToonAgingRequest {
    ImageBuffer input;
    std::optional<ImageBuffer> style;
    std::optional<AgeValue> target_age;
    ControlWeights control;
    bool adaptive = false;
    std::optional<ImageBuffer> age_reference;
    bool prefer_reference = false;
    std::uint64_t seed = 0;

    std::optional<LatentWPlus> reconstruction_override;
    std::optional<LatentZPlus> style_latent_override;
    std::optional<ExtrinsicCodes> extrinsic_override;
};

struct ResolvedAge {
    AgeValue requested;            ///< explicit or estimated age before adaptive scaling
    AgeValue effective;            ///< age fed to the age encoder
    std::optional<double> raw_adaptive;  ///< unclamped adaptive value, when adaptive
    bool from_reference = false;
};

ResolvedAge resolve_age(const ToonAgingRequest& req, const AgeEstimator& estimator);

/// w+_age = E_age(x, a) + E_inv(x)
LatentWPlus age_latent(const EncoderSet& e, const ImageBuffer& x, AgeValue a);

/// f_ex(E_inv,z+(S))
ExtrinsicCodes style_codes(const Generator& g, const EncoderSet& e, const ImageBuffer& style);

ImageBuffer reconstruct(const Generator& g, const EncoderSet& e, const ImageBuffer& x);

ImageBuffer sam_reage(const Generator& g, const EncoderSet& e, const ImageBuffer& x, AgeValue a);

ImageBuffer dual_style_transfer(const Generator& g, const EncoderSet& e, const ImageBuffer& x, const ImageBuffer& s,
                                const ControlWeights& cw);

ImageBuffer toon_aging(const ToonAgingRequest& req, const Generator& g, const EncoderSet& e,
                       const AgeEstimator& estimator);

/// The W+ latent the fine layers of toon_aging are styled with (fused over all layers).
LatentWPlus toon_aging_fused_latent(const ToonAgingRequest& req, const Generator& g, const EncoderSet& e,
                                    const AgeEstimator& estimator);

struct RandomLatents {
    LatentZ z_in;
    LatentZ z_ex;
};

/// z_in then z_ex, each D standard normals drawn in order from Rng(seed).
RandomLatents sample_random_latents(std::size_t dim, std::uint64_t seed);

/// Random generation: w_in = f_in(z_in) broadcast over layers, extrinsic
/// codes = f_ex of z_ex broadcast over layers, default control weights.
ImageBuffer random_generate(const Generator& g, std::uint64_t seed, Convention convention = Convention::extrinsic);

ControlWeights default_control_weights(const GeneratorConfig& config, Convention convention = Convention::extrinsic);

struct GridResult {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<ImageBuffer> cells;  ///< row-major
    std::string row_axis;
    std::string col_axis;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    const ImageBuffer& cell(std::size_t r, std::size_t c) const { return cells.at(r * cols + c); }
};

/// t values 0, 1/(n-1), ..., 1.
std::vector<double> interpolation_steps(std::size_t t_steps);

/// Cell (i, j) runs `base` at ages[i] with extrinsic codes interpolated
/// between the two styles at t_j. `base.input`, `base.control` and
/// `base.adaptive` are honoured; its style and age fields are replaced.
GridResult style_age_grid(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e,
                          const AgeEstimator& estimator, const ImageBuffer& style_a, const ImageBuffer& style_b,
                          const std::vector<AgeValue>& ages, std::size_t t_steps);

/// One cell per cutoff m, control weights (m, c, s) with the base convention.
GridResult sweep_m(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                   const std::vector<std::size_t>& m_values, double c, double s);

/// One cell per coarse weight c, control weights (m, c, s) with the base convention.
GridResult sweep_c(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                   std::size_t m, const std::vector<double>& c_values, double s);

struct FrameResult {
    std::vector<std::filesystem::path> frames;  ///< input files, lexicographic
    std::vector<ImageBuffer> outputs;
};

/// Applies toon_aging to every *.png in `frame_dir` (resampled to the
/// generator resolution) with the settings of `base`.
FrameResult process_frames(const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                           const std::filesystem::path& frame_dir, const ToonAgingRequest& base);

std::string format_label(const std::string& key, double value);

}  // namespace toonfuse
