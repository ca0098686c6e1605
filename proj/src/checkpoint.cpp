#include "toonfuse/checkpoint.hpp"

#include <limits>
#include <string_view>

namespace toonfuse {

namespace {

constexpr std::uint8_t kMaxRank = 8;

TensorTable probe_table(const LinearProbeAgeEstimator& probe) {
    return {{"enc/age_probe.weight", probe.weight()}, {"enc/age_probe.bias", probe.bias()}};
}

struct Parsed {
    std::uint32_t version;
    GeneratorConfig config;
    TensorTable table;
};

Parsed parse(std::span<const std::uint8_t> bytes, bool with_payload) {
    ByteReader r(bytes, "checkpoint");
    if (r.raw(4) != std::string_view(kCheckpointMagic, 4)) throw FormatError("checkpoint: bad magic (expected TAGN)");
    Parsed out;
    out.version = r.u32();
    if (out.version != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(out.version));
    }
    GeneratorConfig& c = out.config;
    c.max_resolution = r.u32();
    c.base_resolution = r.u32();
    c.channel_base = r.u32();
    c.channel_max = r.u32();
    c.latent_dim = r.u32();
    c.seed = r.u64();
    c.coarse_max_resolution = r.u32();

    const std::uint32_t count = r.u32();
    for (std::uint32_t t = 0; t < count; ++t) {
        const std::uint16_t name_len = r.u16();
        std::string name = r.raw(name_len);
        const std::uint8_t rank = r.u8();
        if (rank > kMaxRank) throw FormatError("checkpoint: tensor '" + name + "' has rank " + std::to_string(rank));
        std::vector<std::uint32_t> dims(rank);
        std::uint64_t elements = 1;
        for (auto& d : dims) {
            d = r.u32();
            elements *= d;
            if (elements > r.remaining()) throw FormatError("checkpoint: tensor '" + name + "' exceeds file size");
        }
        if (r.remaining() < elements * 4) throw FormatError("checkpoint: tensor '" + name + "' is truncated");
        Tensor tensor;
        tensor.shape = std::move(dims);
        if (with_payload) {
            tensor.data.resize(elements);
            for (auto& v : tensor.data) v = r.f32();
        } else {
            r.raw(elements * 4);
        }
        out.table.emplace_back(std::move(name), std::move(tensor));
    }
    if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes after tensor table");
    return out;
}

}  // namespace

Checkpoint make_checkpoint(const GeneratorConfig& config, std::uint32_t encoder_channels) {
    return {init_generator(config), init_encoders(config, encoder_channels), LinearProbeAgeEstimator::init(config.seed)};
}

Bytes encode_checkpoint(const Checkpoint& ckpt) {
    TensorTable table = ckpt.generator.to_table();
    for (auto& t : ckpt.encoders.to_table()) table.push_back(std::move(t));
    for (auto& t : probe_table(ckpt.age_probe)) table.push_back(std::move(t));

    const GeneratorConfig& c = ckpt.generator.config();
    ByteWriter w;
    w.raw(std::string_view(kCheckpointMagic, 4));
    w.u32(kCheckpointVersion);
    w.u32(c.max_resolution);
    w.u32(c.base_resolution);
    w.u32(c.channel_base);
    w.u32(c.channel_max);
    w.u32(c.latent_dim);
    w.u64(c.seed);
    w.u32(c.coarse_max_resolution);
    w.u32(static_cast<std::uint32_t>(table.size()));
    for (const auto& [name, tensor] : table) {
        if (name.size() > std::numeric_limits<std::uint16_t>::max()) throw FormatError("checkpoint: tensor name too long");
        w.u16(static_cast<std::uint16_t>(name.size()));
        w.raw(name);
        w.u8(static_cast<std::uint8_t>(tensor.shape.size()));
        for (std::uint32_t d : tensor.shape) w.u32(d);
        for (double v : tensor.data) w.f32(static_cast<float>(v));
    }
    return std::move(w).take();
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
    Parsed parsed = parse(bytes, true);
    try {
        parsed.config.validate();
    } catch (const ValidationError& e) {
        throw FormatError(std::string("checkpoint: invalid config: ") + e.what());
    }
    Generator generator = Generator::from_table(parsed.config, parsed.table);
    EncoderSet encoders = EncoderSet::from_table(parsed.config, parsed.table);
    Tensor probe_w = take_tensor(parsed.table, "enc/age_probe.weight",
                                 {LinearProbeAgeEstimator::kGrid * LinearProbeAgeEstimator::kGrid});
    Tensor probe_b = take_tensor(parsed.table, "enc/age_probe.bias", {1});
    if (!parsed.table.empty()) throw FormatError("checkpoint: unexpected tensor '" + parsed.table.front().first + "'");
    return {std::move(generator), std::move(encoders), LinearProbeAgeEstimator(std::move(probe_w), std::move(probe_b))};
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

CheckpointSummary summarize_checkpoint(std::span<const std::uint8_t> bytes) {
    Parsed parsed = parse(bytes, false);
    CheckpointSummary s{parsed.version, parsed.config, {}};
    for (auto& [name, tensor] : parsed.table) s.tensors.push_back({name, tensor.shape});
    return s;
}

}  // namespace toonfuse
