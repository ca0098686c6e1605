#pragma once

// Latent spaces and the pure algebra on them: per-layer control weights,
// latent fusion, interpolation and adaptive age control.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "toonfuse/errors.hpp"

namespace toonfuse {

inline constexpr std::size_t kDefaultLatentDim = 512;
inline constexpr std::size_t kDefaultLayerCount = 18;

/// Which side of the blend a control weight of 1 selects.
///
/// `extrinsic`: fused = (1 - w) * w_age + w * w_ex, so w = 0 is pure re-aging.
/// `age`:       fused = w * w_age + (1 - w) * w_ex (the literal published form).
enum class Convention { extrinsic, age };

std::string to_string(Convention convention);
Convention parse_convention(const std::string& text);

struct WPlusSpace {};
struct ZPlusSpace {};

/// An L x D block of latent rows, one row per synthesis layer. Immutable;
/// every entry is finite.
template <class Space>
class LatentRows {
public:
    LatentRows() = default;

    LatentRows(std::size_t rows, std::size_t dim) : rows_(rows), dim_(dim), values_(rows * dim, 0.0) {}

    LatentRows(std::size_t rows, std::size_t dim, std::vector<double> values)
        : rows_(rows), dim_(dim), values_(std::move(values)) {
        if (values_.size() != rows_ * dim_) {
            throw DimensionError("latent: expected " + std::to_string(rows_ * dim_) + " values, got " +
                                 std::to_string(values_.size()));
        }
        for (double v : values_) {
            if (!std::isfinite(v)) throw NumericError("latent: non-finite entry");
        }
    }

    static LatentRows broadcast(std::span<const double> row, std::size_t rows) {
        std::vector<double> values;
        values.reserve(rows * row.size());
        for (std::size_t i = 0; i < rows; ++i) values.insert(values.end(), row.begin(), row.end());
        return LatentRows(rows, row.size(), std::move(values));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }

    std::span<const double> values() const noexcept { return values_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * dim_ + j]; }

    bool same_shape(const LatentRows& other) const noexcept {
        return rows_ == other.rows_ && dim_ == other.dim_;
    }

    bool operator==(const LatentRows&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

using LatentWPlus = LatentRows<WPlusSpace>;
using LatentZPlus = LatentRows<ZPlusSpace>;

/// Output of the extrinsic transform: style codes already living in W+.
using ExtrinsicCodes = LatentWPlus;

/// A single pre-mapping latent vector.
class LatentZ {
public:
    explicit LatentZ(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

    bool operator==(const LatentZ&) const = default;

private:
    std::vector<double> values_;
};

/// Target age in years, always within [0, 100].
class AgeValue {
public:
    static constexpr double kMin = 0.0;
    static constexpr double kMax = 100.0;

    explicit AgeValue(double years);

    double years() const noexcept { return years_; }

    bool operator==(const AgeValue&) const = default;

private:
    double years_;
};

/// Per-layer blend vector: the first m layers carry c, the remaining carry s.
class ControlWeights {
public:
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    std::size_t m() const noexcept { return m_; }
    double c() const noexcept { return c_; }
    double s() const noexcept { return s_; }
    Convention convention() const noexcept { return convention_; }

    /// Weight given to the extrinsic (style) side at layer i.
    double extrinsic_weight(std::size_t i) const {
        return convention_ == Convention::extrinsic ? values_[i] : 1.0 - values_[i];
    }

    bool operator==(const ControlWeights&) const = default;

private:
    friend ControlWeights make_control_weights(std::size_t, double, double, std::size_t, Convention);
    friend ControlWeights make_control_weights_from_values(std::vector<double>, Convention);

    std::vector<double> values_;
    std::size_t m_ = 0;
    double c_ = 0.0;
    double s_ = 0.0;
    Convention convention_ = Convention::extrinsic;
};

ControlWeights make_control_weights(std::size_t m, double c, double s, std::size_t layers,
                                    Convention convention = Convention::extrinsic);

/// Arbitrary per-layer weights (each in [0,1]); m, c and s are left at zero.
/// Used for property checks and hand-built blends that are not segment-shaped.
ControlWeights make_control_weights_from_values(std::vector<double> values,
                                                Convention convention = Convention::extrinsic);

/// m = 7 when there are 18 layers, otherwise the number of coarse layers.
std::size_t default_cutoff(std::size_t layers, std::size_t coarse_layers);

inline constexpr double kDefaultCoarseWeight = 0.5;
inline constexpr double kDefaultFineWeight = 1.0;

/// One fused coordinate row. `a` is the age/intrinsic row, `b` the extrinsic row.
void fuse_row(std::span<const double> a, std::span<const double> b, double weight, Convention convention,
              std::span<double> out);

LatentWPlus fuse_latents(const LatentWPlus& w_age, const LatentWPlus& w_ex, const ControlWeights& cw);

/// Elementwise sum, used to add the age residual to the reconstruction latent.
LatentWPlus add_latents(const LatentWPlus& a, const LatentWPlus& b);

double frobenius_distance(std::span<const double> a, std::span<const double> b);

template <class Space>
LatentRows<Space> lerp_latents(const LatentRows<Space>& a, const LatentRows<Space>& b, double t) {
    if (!a.same_shape(b)) throw DimensionError("lerp_latents: shape mismatch");
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t", "must lie in [0,1]");
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    std::vector<double> out(a.values().size());
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = av[k] + t * (bv[k] - av[k]);
    return LatentRows<Space>(a.rows(), a.dim(), std::move(out));
}

struct AdaptiveAge {
    AgeValue age;      ///< clamped to [0,100]
    double raw_years;  ///< before clamping
};

/// Rescales the target age by the inverse mean of the first m control weights.
AdaptiveAge adaptive_target_age(AgeValue target, const ControlWeights& cw);

}  // namespace toonfuse
