#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace burnsight::model {

// Binary feature rows: "FVEC", u8 version = 1, u32-LE dim, u32-LE count,
// then count * dim little-endian float32 values. Row i belongs to manifest
// row i.
struct FeatureMatrix {
  std::uint32_t dim = 0;
  std::vector<float> values;

  std::size_t count() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const float> row(std::size_t i) const {
    return std::span<const float>(values).subspan(i * dim, dim);
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

struct FvecHeader {
  int dim = 0;
  std::size_t count = 0;
};

inline constexpr std::uint8_t kFvecVersion = 1;

std::vector<std::uint8_t> encode_fvec(const FeatureMatrix& matrix);
FeatureMatrix decode_fvec(std::span<const std::uint8_t> bytes);

// Also writes `<path>.json` holding `metadata` as a flat JSON object.
void save_fvec(const FeatureMatrix& matrix, const std::filesystem::path& path,
               const std::map<std::string, std::string>& metadata = {});
FeatureMatrix load_fvec(const std::filesystem::path& path);
FvecHeader read_fvec_header(const std::filesystem::path& path);

std::filesystem::path fvec_sidecar_path(const std::filesystem::path& path);

}  // namespace burnsight::model
