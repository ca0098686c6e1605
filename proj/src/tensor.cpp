#include "toonfuse/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "toonfuse/rng.hpp"

namespace toonfuse {

Tensor fan_in_normal(std::vector<std::uint32_t> dims, std::size_t fan_in, Rng& rng) {
    Tensor t(std::move(dims));
    const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : t.data) v = static_cast<double>(static_cast<float>(rng.normal() * scale));
    return t;
}

Tensor constant_tensor(std::vector<std::uint32_t> dims, double value) {
    Tensor t(std::move(dims));
    std::fill(t.data.begin(), t.data.end(), static_cast<double>(static_cast<float>(value)));
    return t;
}

namespace {

std::string shape_string(const std::vector<std::uint32_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace

Tensor take_tensor(TensorTable& table, const std::string& name, const std::vector<std::uint32_t>& expected_shape) {
    auto it = std::find_if(table.begin(), table.end(), [&](const NamedTensor& t) { return t.first == name; });
    if (it == table.end()) throw FormatError("checkpoint: missing tensor '" + name + "'");
    if (it->second.shape != expected_shape) {
        throw FormatError("checkpoint: tensor '" + name + "' has shape " + shape_string(it->second.shape) +
                          ", expected " + shape_string(expected_shape));
    }
    Tensor out = std::move(it->second);
    table.erase(it);
    return out;
}

}  // namespace toonfuse
