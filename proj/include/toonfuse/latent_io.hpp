#pragma once

// ".lat" latent files:
//   "TALW" | version u32 | L u32 | D u32 | L*D float32, row-major
// All integers and reals little-endian.

#include <cstdint>
#include <filesystem>

#include "toonfuse/binary_io.hpp"
#include "toonfuse/latent.hpp"

namespace toonfuse {

inline constexpr char kLatentMagic[4] = {'T', 'A', 'L', 'W'};
inline constexpr std::uint32_t kLatentVersion = 1;

struct LatentBlock {
    std::uint32_t rows = 0;
    std::uint32_t dim = 0;
    std::vector<double> values;
};

Bytes encode_latent(std::size_t rows, std::size_t dim, std::span<const double> values);
LatentBlock decode_latent(std::span<const std::uint8_t> bytes);

template <class Space>
void save_latent(const std::filesystem::path& path, const LatentRows<Space>& latent) {
    const Bytes bytes = encode_latent(latent.rows(), latent.dim(), latent.values());
    write_file_atomic(path, bytes);
}

template <class Space>
LatentRows<Space> load_latent(const std::filesystem::path& path) {
    LatentBlock block = decode_latent(read_file(path));
    return LatentRows<Space>(block.rows, block.dim, std::move(block.values));
}

}  // namespace toonfuse
