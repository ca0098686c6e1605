#include "toonfuse/latent_io.hpp"

#include <string_view>

namespace toonfuse {

Bytes encode_latent(std::size_t rows, std::size_t dim, std::span<const double> values) {
    if (values.size() != rows * dim) throw DimensionError("encode_latent: value count does not match L*D");
    ByteWriter w;
    w.raw(std::string_view(kLatentMagic, 4));
    w.u32(kLatentVersion);
    w.u32(static_cast<std::uint32_t>(rows));
    w.u32(static_cast<std::uint32_t>(dim));
    for (double v : values) w.f32(static_cast<float>(v));
    return std::move(w).take();
}

LatentBlock decode_latent(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "latent file");
    if (r.raw(4) != std::string_view(kLatentMagic, 4)) throw FormatError("latent file: bad magic (expected TALW)");
    const std::uint32_t version = r.u32();
    if (version != kLatentVersion) {
        throw FormatError("latent file: unsupported version " + std::to_string(version));
    }
    LatentBlock block;
    block.rows = r.u32();
    block.dim = r.u32();
    const std::uint64_t count = std::uint64_t{block.rows} * block.dim;
    if (count * 4 != r.remaining()) throw FormatError("latent file: payload size does not match L*D");
    block.values.resize(count);
    for (auto& v : block.values) v = r.f32();
    return block;
}

}  // namespace toonfuse
