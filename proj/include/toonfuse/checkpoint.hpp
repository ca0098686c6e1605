#pragma once

// ".tagn" checkpoints:
//   "TAGN" | version u32
//   config: max_resolution u32 | base_resolution u32 | channel_base u32 |
//           channel_max u32 | latent_dim u32 | seed u64 | coarse_max_resolution u32
//   count u32, then per tensor:
//     name_len u16 | name bytes | rank u8 | dims u32 x rank | payload float32 x prod(dims)
// Little-endian throughout. Encoder and age-probe tensors live under "enc/".

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toonfuse/binary_io.hpp"
#include "toonfuse/encoders.hpp"
#include "toonfuse/synthesis.hpp"

namespace toonfuse {

inline constexpr char kCheckpointMagic[4] = {'T', 'A', 'G', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    Generator generator;
    EncoderSet encoders;
    LinearProbeAgeEstimator age_probe;
};

Checkpoint make_checkpoint(const GeneratorConfig& config, std::uint32_t encoder_channels = kDefaultEncoderChannels);

Bytes encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TensorInfo {
    std::string name;
    std::vector<std::uint32_t> shape;
};

/// Header and tensor table without building the model.
struct CheckpointSummary {
    std::uint32_t version = 0;
    GeneratorConfig config;
    std::vector<TensorInfo> tensors;
};

CheckpointSummary summarize_checkpoint(std::span<const std::uint8_t> bytes);

}  // namespace toonfuse
