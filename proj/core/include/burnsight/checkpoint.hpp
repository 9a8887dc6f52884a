#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "burnsight/fusion_model.hpp"

namespace burnsight::model {

inline constexpr std::uint8_t kCheckpointVersion = 1;

// Layout: "BSCK", u8 version, u32-LE header length, UTF-8 JSON header with
// dimensions and metadata, then every parameter as little-endian float32 in
// declaration order (projection W, b, hidden W, b, output W, b; row-major).
std::vector<std::uint8_t> encode_checkpoint(const FusionModel& model);
FusionModel decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const FusionModel& model, const std::filesystem::path& path);
FusionModel load_checkpoint(const std::filesystem::path& path);

}  // namespace burnsight::model
