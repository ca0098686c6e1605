#include "toonfuse/encoders.hpp"

#include <algorithm>
#include <cmath>

#include "nn_ops.hpp"
#include "toonfuse/rng.hpp"

namespace toonfuse {

using detail::FeatureMap;

namespace {

constexpr std::uint64_t kEncoderStream = 1;
constexpr std::uint64_t kAgeProbeStream = 2;

ConvEncoderParams init_conv_encoder(std::uint32_t c_in, std::uint32_t channels, std::uint32_t out, Rng& rng) {
    ConvEncoderParams p;
    p.conv1_weight = fan_in_normal({channels, c_in, 3, 3}, std::size_t{c_in} * 9, rng);
    p.conv1_bias = constant_tensor({channels}, 0.0);
    p.conv2_weight = fan_in_normal({channels, channels, 3, 3}, std::size_t{channels} * 9, rng);
    p.conv2_bias = constant_tensor({channels}, 0.0);
    p.head.weight = fan_in_normal({out, channels}, channels, rng);
    p.head.bias = constant_tensor({out}, 0.0);
    return p;
}

void push_encoder(TensorTable& t, const std::string& prefix, const ConvEncoderParams& p) {
    t.emplace_back(prefix + ".conv1.weight", p.conv1_weight);
    t.emplace_back(prefix + ".conv1.bias", p.conv1_bias);
    t.emplace_back(prefix + ".conv2.weight", p.conv2_weight);
    t.emplace_back(prefix + ".conv2.bias", p.conv2_bias);
    t.emplace_back(prefix + ".head.weight", p.head.weight);
    t.emplace_back(prefix + ".head.bias", p.head.bias);
}

bool has_tensor(const TensorTable& t, const std::string& name) {
    return std::any_of(t.begin(), t.end(), [&](const NamedTensor& n) { return n.first == name; });
}

ConvEncoderParams take_encoder(TensorTable& t, const std::string& prefix, std::uint32_t c_in, std::uint32_t out) {
    auto it = std::find_if(t.begin(), t.end(), [&](const NamedTensor& n) { return n.first == prefix + ".conv1.weight"; });
    if (it == t.end()) throw FormatError("checkpoint: missing tensor '" + prefix + ".conv1.weight'");
    if (it->second.shape.size() != 4) throw FormatError("checkpoint: '" + prefix + ".conv1.weight' must have rank 4");
    const std::uint32_t channels = it->second.shape[0];
    ConvEncoderParams p;
    p.conv1_weight = take_tensor(t, prefix + ".conv1.weight", {channels, c_in, 3, 3});
    p.conv1_bias = take_tensor(t, prefix + ".conv1.bias", {channels});
    p.conv2_weight = take_tensor(t, prefix + ".conv2.weight", {channels, channels, 3, 3});
    p.conv2_bias = take_tensor(t, prefix + ".conv2.bias", {channels});
    p.head.weight = take_tensor(t, prefix + ".head.weight", {out, channels});
    p.head.bias = take_tensor(t, prefix + ".head.bias", {out});
    return p;
}

void add_bias_leaky(FeatureMap& m, const Tensor& bias) {
    for (std::size_t c = 0; c < m.channels; ++c) {
        double* ch = m.channel(c);
        for (std::size_t q = 0; q < m.plane(); ++q) ch[q] = detail::leaky(ch[q] + bias.data[c]);
    }
}

std::vector<double> run_encoder(const ConvEncoderParams& p, const FeatureMap& input) {
    FeatureMap a1 = detail::conv3x3(p.conv1_weight, input);
    add_bias_leaky(a1, p.conv1_bias);
    FeatureMap pooled = detail::avgpool2x(a1);
    FeatureMap a2 = detail::conv3x3(p.conv2_weight, pooled);
    add_bias_leaky(a2, p.conv2_bias);

    std::vector<double> features(a2.channels);
    for (std::size_t c = 0; c < a2.channels; ++c) {
        const double* ch = a2.channel(c);
        double acc = 0.0;
        for (std::size_t q = 0; q < a2.plane(); ++q) acc += ch[q];
        features[c] = acc / static_cast<double>(a2.plane());
    }
    std::vector<double> out(p.head.weight.dim(0));
    detail::dense_forward(p.head.weight, p.head.bias, features, out);
    return out;
}

void check_input(const EncoderSet& e, const ImageBuffer& x, const char* what) {
    if (x.height() != e.input_resolution() || x.width() != e.input_resolution()) {
        throw DimensionError(std::string(what) + ": image is " + std::to_string(x.height()) + "x" +
                             std::to_string(x.width()) + ", encoder expects " + std::to_string(e.input_resolution()) +
                             "x" + std::to_string(e.input_resolution()));
    }
}

}  // namespace

EncoderSet::EncoderSet(std::size_t input_resolution, std::size_t layers, std::size_t dim, ConvEncoderParams inv_wplus,
                       ConvEncoderParams inv_zplus, std::optional<ConvEncoderParams> age, std::uint64_t seed)
    : input_resolution_(input_resolution),
      layers_(layers),
      dim_(dim),
      inv_wplus_(std::move(inv_wplus)),
      inv_zplus_(std::move(inv_zplus)),
      age_(std::move(age)),
      seed_(seed) {
    const auto check = [&](const ConvEncoderParams& p, std::size_t c_in, const char* name) {
        if (p.input_channels() != c_in || p.head.weight.dim(0) != layers_ * dim_) {
            throw DimensionError(std::string("encoder '") + name + "' does not match the generator shape");
        }
    };
    check(inv_wplus_, 3, "inv_wplus");
    check(inv_zplus_, 3, "inv_zplus");
    if (age_) check(*age_, 4, "age");
}

EncoderSet EncoderSet::with_null_age() const {
    EncoderSet copy = *this;
    copy.age_.reset();
    return copy;
}

TensorTable EncoderSet::to_table() const {
    TensorTable t;
    push_encoder(t, "enc/inv_wplus", inv_wplus_);
    push_encoder(t, "enc/inv_zplus", inv_zplus_);
    if (age_) push_encoder(t, "enc/age", *age_);
    return t;
}

EncoderSet EncoderSet::from_table(const GeneratorConfig& config, TensorTable& table) {
    const std::size_t layers = config.layer_count();
    const auto out = static_cast<std::uint32_t>(layers * config.latent_dim);
    ConvEncoderParams wplus = take_encoder(table, "enc/inv_wplus", 3, out);
    ConvEncoderParams zplus = take_encoder(table, "enc/inv_zplus", 3, out);
    std::optional<ConvEncoderParams> age;
    if (has_tensor(table, "enc/age.conv1.weight")) age = take_encoder(table, "enc/age", 4, out);
    return EncoderSet(config.max_resolution, layers, config.latent_dim, std::move(wplus), std::move(zplus),
                      std::move(age), derive_seed(config.seed, kEncoderStream));
}

EncoderSet init_encoders(const GeneratorConfig& config, std::uint32_t channels) {
    config.validate();
    if (channels < 1) throw ValidationError("encoder_channels", "must be at least 1");
    const std::uint64_t seed = derive_seed(config.seed, kEncoderStream);
    Rng rng(seed);
    const std::size_t layers = config.layer_count();
    const auto out = static_cast<std::uint32_t>(layers * config.latent_dim);
    ConvEncoderParams wplus = init_conv_encoder(3, channels, out, rng);
    ConvEncoderParams zplus = init_conv_encoder(3, channels, out, rng);
    ConvEncoderParams age = init_conv_encoder(4, channels, out, rng);
    return EncoderSet(config.max_resolution, layers, config.latent_dim, std::move(wplus), std::move(zplus),
                      std::move(age), seed);
}

LatentWPlus encode_inv_wplus(const EncoderSet& e, const ImageBuffer& x) {
    check_input(e, x, "encode_inv_wplus");
    return LatentWPlus(e.layers(), e.dim(), run_encoder(e.inv_wplus(), detail::planar_from_rgb(x.values(), x.height(), x.width())));
}

LatentZPlus encode_inv_zplus(const EncoderSet& e, const ImageBuffer& s) {
    check_input(e, s, "encode_inv_zplus");
    return LatentZPlus(e.layers(), e.dim(), run_encoder(e.inv_zplus(), detail::planar_from_rgb(s.values(), s.height(), s.width())));
}

LatentWPlus encode_age(const EncoderSet& e, const ImageBuffer& x, AgeValue a) {
    check_input(e, x, "encode_age");
    if (e.null_age()) return LatentWPlus(e.layers(), e.dim());
    const FeatureMap rgb = detail::planar_from_rgb(x.values(), x.height(), x.width());
    FeatureMap input(4, x.height(), x.width());
    std::copy(rgb.data.begin(), rgb.data.end(), input.data.begin());
    std::fill(input.data.begin() + static_cast<std::ptrdiff_t>(3 * rgb.plane()), input.data.end(), a.years() / 100.0);
    return LatentWPlus(e.layers(), e.dim(), run_encoder(*e.age(), input));
}

// ---- age estimation ----------------------------------------------------------

std::vector<double> grayscale_grid(const ImageBuffer& image, std::size_t cells) {
    std::vector<double> gray(image.height() * image.width() * 3);
    for (std::size_t q = 0; q < image.height() * image.width(); ++q) {
        const double* px = image.values().data() + q * 3;
        const double v = (px[0] + px[1] + px[2]) / 3.0;
        gray[q * 3 + 0] = gray[q * 3 + 1] = gray[q * 3 + 2] = v;
    }
    return box_downsample(ImageBuffer::clamped(image.height(), image.width(), std::move(gray)), cells, 0);
}

LinearProbeAgeEstimator::LinearProbeAgeEstimator(Tensor weight, Tensor bias)
    : weight_(std::move(weight)), bias_(std::move(bias)) {
    if (weight_.size() != kGrid * kGrid || bias_.size() != 1) {
        throw DimensionError("linear probe: expected 256 weights and one bias");
    }
}

LinearProbeAgeEstimator LinearProbeAgeEstimator::init(std::uint64_t seed) {
    Rng rng(derive_seed(seed, kAgeProbeStream));
    return LinearProbeAgeEstimator(fan_in_normal({kGrid * kGrid}, kGrid * kGrid, rng), constant_tensor({1}, 0.0));
}

AgeValue LinearProbeAgeEstimator::estimate(const ImageBuffer& image) const {
    const auto grid = grayscale_grid(image, kGrid);
    double acc = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) acc += weight_.data[j] * grid[j];
    const double logit = acc + bias_.data[0];
    const double years = 100.0 / (1.0 + std::exp(-logit));
    return AgeValue(std::clamp(years, AgeValue::kMin, AgeValue::kMax));
}

AgeValue estimate_age(const AgeEstimator& estimator, const ImageBuffer& reference) {
    if (reference.size() == 0) throw ValidationError("age_reference", "empty image");
    return estimator.estimate(reference);
}

// ---- projection --------------------------------------------------------------

ProjectionReport project_latent(const Generator& g, const ImageBuffer& target, const LatentWPlus& init,
                                const ProjectionOptions& options) {
    if (!(options.step_size > 0.0)) throw ValidationError("step_size", "must be positive");

    ProjectionReport report;
    LatentGradient current = latent_gradient(g, init, target);
    report.latent = init;
    report.loss_trace.push_back(current.loss);
    double eta = options.step_size;

    for (std::size_t step = 0; step < options.max_steps; ++step) {
        if (current.loss == 0.0) break;
        const auto w = report.latent.values();
        const auto grad = current.gradient.values();

        std::optional<LatentWPlus> accepted;
        for (std::size_t b = 0; b <= options.max_backtracks; ++b, eta *= 0.5) {
            std::vector<double> cand(w.size());
            for (std::size_t k = 0; k < w.size(); ++k) cand[k] = w[k] - eta * grad[k];
            LatentWPlus candidate(report.latent.rows(), report.latent.dim(), std::move(cand));
            const double loss = reconstruction_loss(g, candidate, target);
            if (!std::isfinite(loss)) {
                throw NumericError("project_latent: non-finite loss at step " + std::to_string(step));
            }
            if (loss < current.loss) {
                accepted = std::move(candidate);
                break;
            }
        }
        if (!accepted) break;

        current = latent_gradient(g, *accepted, target);
        report.latent = std::move(*accepted);
        report.loss_trace.push_back(current.loss);
        ++report.steps;
        eta *= 2.0;
    }
    return report;
}

}  // namespace toonfuse
