#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "toonfuse/errors.hpp"

namespace toonfuse {

class Rng;

/// Dense row-major parameter array.
struct Tensor {
    std::vector<std::uint32_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::uint32_t> dims)
        : shape(std::move(dims)), data(element_count(shape), 0.0) {}

    static std::size_t element_count(const std::vector<std::uint32_t>& dims) {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    }

    std::size_t size() const noexcept { return data.size(); }
    std::uint32_t dim(std::size_t axis) const { return shape.at(axis); }

    bool operator==(const Tensor&) const = default;
};

/// Normal(0, 1/fan_in) entries, rounded to float32 so that checkpoint
/// round-trips are exact.
Tensor fan_in_normal(std::vector<std::uint32_t> dims, std::size_t fan_in, Rng& rng);
Tensor constant_tensor(std::vector<std::uint32_t> dims, double value);

using NamedTensor = std::pair<std::string, Tensor>;
using TensorTable = std::vector<NamedTensor>;

/// Removes and returns the tensor called `name`, checking its shape.
Tensor take_tensor(TensorTable& table, const std::string& name, const std::vector<std::uint32_t>& expected_shape);

}  // namespace toonfuse
