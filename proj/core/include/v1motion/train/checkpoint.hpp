#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "v1motion/model/encoder.hpp"
#include "v1motion/model/motion_model.hpp"
#include "v1motion/train/config.hpp"

namespace v1motion::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainConfig config;
  model::Encoder encoder;
  model::MotionModel motion;
};

/// "V1CK", u32 version, u64 header length, header JSON (shapes, config,
/// displacement grid, support), then W row-major and the motion parameters
/// as little-endian float64.
std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace v1motion::train
