#include "toonfuse/pipeline.hpp"

#include <algorithm>
#include <cstdio>

#include "toonfuse/parallel.hpp"
#include "toonfuse/png_io.hpp"
#include "toonfuse/rng.hpp"

namespace toonfuse {

ResolvedAge resolve_age(const ToonAgingRequest& req, const AgeEstimator& estimator) {
    std::optional<AgeValue> age;
    bool from_reference = false;
    if (req.age_reference) {
        if (req.target_age && !req.prefer_reference) {
            throw ValidationError("age_reference",
                                  "both a target age and an age reference were given; select the reference explicitly");
        }
        age = estimate_age(estimator, *req.age_reference);
        from_reference = true;
    } else if (req.target_age) {
        age = req.target_age;
    } else {
        throw ValidationError("target_age", "either a target age or an age reference is required");
    }

    ResolvedAge out{*age, *age, std::nullopt, from_reference};
    if (req.adaptive) {
        const AdaptiveAge adapted = adaptive_target_age(*age, req.control);
        out.effective = adapted.age;
        out.raw_adaptive = adapted.raw_years;
    }
    return out;
}

LatentWPlus age_latent(const EncoderSet& e, const ImageBuffer& x, AgeValue a) {
    return add_latents(encode_age(e, x, a), encode_inv_wplus(e, x));
}

ExtrinsicCodes style_codes(const Generator& g, const EncoderSet& e, const ImageBuffer& style) {
    return extrinsic_transform(g, encode_inv_zplus(e, style));
}

ImageBuffer reconstruct(const Generator& g, const EncoderSet& e, const ImageBuffer& x) {
    return synthesize(g, encode_inv_wplus(e, x));
}

ImageBuffer sam_reage(const Generator& g, const EncoderSet& e, const ImageBuffer& x, AgeValue a) {
    return synthesize(g, age_latent(e, x, a));
}

ImageBuffer dual_style_transfer(const Generator& g, const EncoderSet& e, const ImageBuffer& x, const ImageBuffer& s,
                                const ControlWeights& cw) {
    return synthesize_dual(g, encode_inv_wplus(e, x), style_codes(g, e, s), cw);
}

namespace {

struct PreparedLatents {
    LatentWPlus w_age;
    ExtrinsicCodes codes;
};

PreparedLatents prepare(const ToonAgingRequest& req, const Generator& g, const EncoderSet& e,
                        const AgeEstimator& estimator) {
    const ResolvedAge age = resolve_age(req, estimator);
    const LatentWPlus residual = encode_age(e, req.input, age.effective);
    const LatentWPlus reconstruction =
        req.reconstruction_override ? *req.reconstruction_override : encode_inv_wplus(e, req.input);
    LatentWPlus w_age = add_latents(residual, reconstruction);

    if (req.extrinsic_override) return {std::move(w_age), *req.extrinsic_override};
    if (req.style_latent_override) return {std::move(w_age), extrinsic_transform(g, *req.style_latent_override)};
    if (!req.style) throw ValidationError("style", "a style image or a style latent is required");
    return {std::move(w_age), style_codes(g, e, *req.style)};
}

}  // namespace

ImageBuffer toon_aging(const ToonAgingRequest& req, const Generator& g, const EncoderSet& e,
                       const AgeEstimator& estimator) {
    const PreparedLatents latents = prepare(req, g, e, estimator);
    return synthesize_dual(g, latents.w_age, latents.codes, req.control);
}

LatentWPlus toon_aging_fused_latent(const ToonAgingRequest& req, const Generator& g, const EncoderSet& e,
                                    const AgeEstimator& estimator) {
    const PreparedLatents latents = prepare(req, g, e, estimator);
    return fuse_latents(latents.w_age, latents.codes, req.control);
}

RandomLatents sample_random_latents(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> z_in(dim);
    std::vector<double> z_ex(dim);
    for (double& v : z_in) v = rng.normal();
    for (double& v : z_ex) v = rng.normal();
    return {LatentZ(std::move(z_in)), LatentZ(std::move(z_ex))};
}

ControlWeights default_control_weights(const GeneratorConfig& config, Convention convention) {
    const std::size_t layers = config.layer_count();
    return make_control_weights(default_cutoff(layers, config.coarse_layer_count()), kDefaultCoarseWeight,
                                kDefaultFineWeight, layers, convention);
}

ImageBuffer random_generate(const Generator& g, std::uint64_t seed, Convention convention) {
    const RandomLatents z = sample_random_latents(g.latent_dim(), seed);
    const std::size_t layers = g.layer_count();
    const std::vector<double> w = map_z_to_w(g, z.z_in);
    const LatentWPlus w_in = LatentWPlus::broadcast(w, layers);
    const ExtrinsicCodes codes = extrinsic_transform(g, LatentZPlus::broadcast(z.z_ex.values(), layers));
    return synthesize_dual(g, w_in, codes, default_control_weights(g.config(), convention));
}

std::string format_label(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s=%g", key.c_str(), value);
    return buf;
}

std::vector<double> interpolation_steps(std::size_t t_steps) {
    if (t_steps < 2) throw ValidationError("t_steps", "need at least 2 interpolation steps");
    std::vector<double> t(t_steps);
    for (std::size_t j = 0; j < t_steps; ++j) t[j] = static_cast<double>(j) / static_cast<double>(t_steps - 1);
    return t;
}

GridResult style_age_grid(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e,
                          const AgeEstimator& estimator, const ImageBuffer& style_a, const ImageBuffer& style_b,
                          const std::vector<AgeValue>& ages, std::size_t t_steps) {
    if (ages.empty()) throw ValidationError("ages", "at least one age is required");
    const std::vector<double> ts = interpolation_steps(t_steps);
    const ExtrinsicCodes codes_a = style_codes(g, e, style_a);
    const ExtrinsicCodes codes_b = style_codes(g, e, style_b);

    GridResult grid;
    grid.rows = ages.size();
    grid.cols = ts.size();
    grid.row_axis = "age";
    grid.col_axis = "t";
    for (const AgeValue& a : ages) grid.row_labels.push_back(format_label("age", a.years()));
    for (double t : ts) grid.col_labels.push_back(format_label("t", t));
    grid.cells.resize(grid.rows * grid.cols);

    parallel_for(grid.cells.size(), [&](std::size_t idx) {
        ToonAgingRequest req = base;
        req.target_age = ages[idx / grid.cols];
        req.age_reference.reset();
        req.style.reset();
        req.style_latent_override.reset();
        req.extrinsic_override = lerp_latents(codes_a, codes_b, ts[idx % grid.cols]);
        grid.cells[idx] = toon_aging(req, g, e, estimator);
    });
    return grid;
}

namespace {

GridResult run_sweep(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e,
                     const AgeEstimator& estimator, std::vector<ControlWeights> controls, std::string axis,
                     std::vector<std::string> labels) {
    GridResult grid;
    grid.rows = 1;
    grid.cols = controls.size();
    grid.col_axis = std::move(axis);
    grid.col_labels = std::move(labels);
    grid.cells.resize(controls.size());
    parallel_for(controls.size(), [&](std::size_t idx) {
        ToonAgingRequest req = base;
        req.control = controls[idx];
        grid.cells[idx] = toon_aging(req, g, e, estimator);
    });
    return grid;
}

}  // namespace

GridResult sweep_m(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                   const std::vector<std::size_t>& m_values, double c, double s) {
    if (m_values.empty()) throw ValidationError("values", "sweep needs at least one m value");
    std::vector<ControlWeights> controls;
    std::vector<std::string> labels;
    for (std::size_t m : m_values) {
        controls.push_back(make_control_weights(m, c, s, g.layer_count(), base.control.convention()));
        labels.push_back(format_label("m", static_cast<double>(m)));
    }
    return run_sweep(base, g, e, estimator, std::move(controls), "m", std::move(labels));
}

GridResult sweep_c(const ToonAgingRequest& base, const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                   std::size_t m, const std::vector<double>& c_values, double s) {
    if (c_values.empty()) throw ValidationError("values", "sweep needs at least one c value");
    std::vector<ControlWeights> controls;
    std::vector<std::string> labels;
    for (double c : c_values) {
        controls.push_back(make_control_weights(m, c, s, g.layer_count(), base.control.convention()));
        labels.push_back(format_label("c", c));
    }
    return run_sweep(base, g, e, estimator, std::move(controls), "c", std::move(labels));
}

FrameResult process_frames(const Generator& g, const EncoderSet& e, const AgeEstimator& estimator,
                           const std::filesystem::path& frame_dir, const ToonAgingRequest& base) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(frame_dir, ec)) throw IoError("frame directory '" + frame_dir.string() + "' not found");

    FrameResult result;
    for (const auto& entry : fs::directory_iterator(frame_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (ext == ".png") result.frames.push_back(entry.path());
    }
    if (result.frames.empty()) throw ValidationError("frames", "no PNG frames in '" + frame_dir.string() + "'");
    std::sort(result.frames.begin(), result.frames.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });

    // Decode everything first so a bad frame aborts before any compute.
    const std::size_t res = g.config().max_resolution;
    std::vector<ImageBuffer> inputs;
    for (const auto& path : result.frames) {
        try {
            inputs.push_back(resize_bilinear(read_png(path), res, res));
        } catch (const IoError& err) {
            throw IoError("cannot read frame '" + path.string() + "': " + err.what());
        }
    }

    result.outputs.resize(inputs.size());
    parallel_for(inputs.size(), [&](std::size_t i) {
        ToonAgingRequest req = base;
        req.input = inputs[i];
        result.outputs[i] = toon_aging(req, g, e, estimator);
    });
    return result;
}

}  // namespace toonfuse
