#include "toonfuse/latent.hpp"

#include <algorithm>

namespace toonfuse {

std::string to_string(Convention convention) {
    return convention == Convention::extrinsic ? "extrinsic" : "age";
}

Convention parse_convention(const std::string& text) {
    if (text == "extrinsic") return Convention::extrinsic;
    if (text == "age") return Convention::age;
    throw ValidationError("convention", "expected 'extrinsic' or 'age', got '" + text + "'");
}

LatentZ::LatentZ(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw NumericError("latent z: non-finite entry");
    }
}

AgeValue::AgeValue(double years) : years_(years) {
    if (!(years >= kMin && years <= kMax)) {
        throw ValidationError("age", "must lie in [0,100], got " + std::to_string(years));
    }
}

namespace {

bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

ControlWeights make_control_weights(std::size_t m, double c, double s, std::size_t layers, Convention convention) {
    if (layers < 1) throw ValidationError("L", "layer count must be at least 1");
    if (m > layers) {
        throw ValidationError("m", "cutoff " + std::to_string(m) + " exceeds layer count " + std::to_string(layers));
    }
    if (!unit_interval(c)) throw ValidationError("c", "must lie in [0,1], got " + std::to_string(c));
    if (!unit_interval(s)) throw ValidationError("s", "must lie in [0,1], got " + std::to_string(s));

    ControlWeights cw;
    cw.values_.assign(layers, s);
    std::fill_n(cw.values_.begin(), m, c);
    cw.m_ = m;
    cw.c_ = c;
    cw.s_ = s;
    cw.convention_ = convention;
    return cw;
}

ControlWeights make_control_weights_from_values(std::vector<double> values, Convention convention) {
    if (values.empty()) throw ValidationError("L", "layer count must be at least 1");
    for (double v : values) {
        if (!unit_interval(v)) throw ValidationError("w", "every control weight must lie in [0,1]");
    }
    ControlWeights cw;
    cw.values_ = std::move(values);
    cw.convention_ = convention;
    return cw;
}

std::size_t default_cutoff(std::size_t layers, std::size_t coarse_layers) {
    return layers == kDefaultLayerCount ? 7 : std::min(coarse_layers, layers);
}

void fuse_row(std::span<const double> a, std::span<const double> b, double weight, Convention convention,
              std::span<double> out) {
    // Weight on the age side and on the extrinsic side, as written for each convention.
    const double wa = convention == Convention::extrinsic ? 1.0 - weight : weight;
    const double wb = convention == Convention::extrinsic ? weight : 1.0 - weight;
    if (wb == 0.0) {
        std::copy(a.begin(), a.end(), out.begin());
        return;
    }
    if (wa == 0.0) {
        std::copy(b.begin(), b.end(), out.begin());
        return;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = wa * a[j] + wb * b[j];
}

LatentWPlus fuse_latents(const LatentWPlus& w_age, const LatentWPlus& w_ex, const ControlWeights& cw) {
    if (!w_age.same_shape(w_ex)) throw DimensionError("fuse_latents: w_age and w_ex shapes differ");
    if (cw.size() != w_age.rows()) {
        throw DimensionError("fuse_latents: control weights have " + std::to_string(cw.size()) +
                             " layers, latents have " + std::to_string(w_age.rows()));
    }
    const std::size_t dim = w_age.dim();
    std::vector<double> out(w_age.values().size());
    for (std::size_t i = 0; i < w_age.rows(); ++i) {
        fuse_row(w_age.row(i), w_ex.row(i), cw[i], cw.convention(), std::span<double>(out.data() + i * dim, dim));
    }
    return LatentWPlus(w_age.rows(), dim, std::move(out));
}

LatentWPlus add_latents(const LatentWPlus& a, const LatentWPlus& b) {
    if (!a.same_shape(b)) throw DimensionError("add_latents: shape mismatch");
    std::vector<double> out(a.values().size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.values()[k] + b.values()[k];
    return LatentWPlus(a.rows(), a.dim(), std::move(out));
}

double frobenius_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("frobenius_distance: size mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

AdaptiveAge adaptive_target_age(AgeValue target, const ControlWeights& cw) {
    const std::size_t m = cw.m();
    if (m == 0) throw ValidationError("m", "adaptive age control needs at least one coarse layer");
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += cw[i];
    const double mean = sum / static_cast<double>(m);
    if (!(mean > 0.0)) throw ValidationError("c", "adaptive age control is undefined for a zero coarse weight");
    const double raw = target.years() / mean;
    return {AgeValue(std::clamp(raw, AgeValue::kMin, AgeValue::kMax)), raw};
}

}  // namespace toonfuse
