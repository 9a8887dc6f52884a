#include "burnsight/backbone.hpp"

#include <string>

#include "burnsight/error.hpp"
#include "burnsight/fvec.hpp"

namespace burnsight::model {

std::vector<double> builtin_backbone(const imaging::GrayImage& img) {
  constexpr int kSide = kPoolGrid * kPoolPatch;
  if (img.width() != kSide || img.height() != kSide) {
    throw UsageError("builtin backbone expects 224x224 input, got " + std::to_string(img.width()) +
                     "x" + std::to_string(img.height()));
  }
  std::vector<double> out(kBuiltinDim, 0.0);
  const double inv = 1.0 / (kPoolPatch * kPoolPatch);
  for (int r = 0; r < kPoolGrid; ++r) {
    for (int c = 0; c < kPoolGrid; ++c) {
      double sum = 0.0;
      for (int y = r * kPoolPatch; y < (r + 1) * kPoolPatch; ++y) {
        for (int x = c * kPoolPatch; x < (c + 1) * kPoolPatch; ++x) sum += img.at(x, y);
      }
      out[static_cast<std::size_t>(r) * kPoolGrid + c] = sum * inv;
    }
  }
  return out;
}

std::string_view to_string(BackboneKind kind) {
  return kind == BackboneKind::kBuiltinPool ? "builtin-pool" : "feature-file";
}

BackboneKind parse_backbone_kind(std::string_view text) {
  if (text == "builtin-pool") return BackboneKind::kBuiltinPool;
  if (text == "feature-file") return BackboneKind::kFeatureFile;
  throw FormatError(FormatErrorKind::kMalformed, "unknown backbone kind '" + std::string(text) + "'");
}

BackboneSource BackboneSource::parse(std::string_view spec) {
  if (spec == "builtin") return {};
  constexpr std::string_view kPrefix = "fvec:";
  if (spec.substr(0, kPrefix.size()) == kPrefix && spec.size() > kPrefix.size()) {
    BackboneSource source;
    source.kind = BackboneKind::kFeatureFile;
    source.path = std::string(spec.substr(kPrefix.size()));
    source.dim = read_fvec_header(source.path).dim;
    return source;
  }
  throw UsageError("backbone must be 'builtin' or 'fvec:PATH', got '" + std::string(spec) + "'");
}

}  // namespace burnsight::model
