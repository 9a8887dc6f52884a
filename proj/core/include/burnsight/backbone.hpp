#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "burnsight/image.hpp"

namespace burnsight::model {

inline constexpr int kPoolGrid = 16;
inline constexpr int kPoolPatch = 14;
inline constexpr int kBuiltinDim = kPoolGrid * kPoolGrid;

// 16x16 grid of mean-pooled 14x14 patches of a 224x224 image, row-major.
// Every output is a plain mean of its inputs, so d out_k / d pixel is
// 1/196 inside patch k and 0 elsewhere.
std::vector<double> builtin_backbone(const imaging::GrayImage& img);

enum class BackboneKind { kBuiltinPool, kFeatureFile };

std::string_view to_string(BackboneKind kind);
BackboneKind parse_backbone_kind(std::string_view text);

// Where the primary feature vector v1 comes from.
struct BackboneSource {
  BackboneKind kind = BackboneKind::kBuiltinPool;
  std::filesystem::path path;  // feature-file only
  int dim = kBuiltinDim;       // feature-file: taken from the FVEC header

  // "builtin" or "fvec:PATH". The FVEC header is read to fill in dim.
  static BackboneSource parse(std::string_view spec);
};

}  // namespace burnsight::model
