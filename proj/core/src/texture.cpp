#include "burnsight/texture.hpp"

#include <algorithm>
#include <cmath>

#include "burnsight/error.hpp"

namespace burnsight::texture {

void GlcmConfig::validate() const {
  if (levels < 2 || levels > 65536) throw UsageError("GLCM gray levels must be in [2, 65536]");
  if (offsets.empty()) throw UsageError("GLCM needs at least one offset");
  for (const auto& o : offsets) {
    if (o.dx == 0 && o.dy == 0) throw UsageError("GLCM offset (0,0) is not allowed");
  }
}

LevelGrid quantize(const imaging::GrayImage& img, int levels) {
  if (levels < 2 || levels > 65536) throw UsageError("quantization levels must be in [2, 65536]");
  LevelGrid grid{img.width(), img.height(), levels, {}};
  grid.data.resize(img.size());
  const auto pixels = img.pixels();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const auto level = static_cast<int>(std::floor(pixels[i] * levels));
    grid.data[i] = static_cast<std::uint16_t>(std::clamp(level, 0, levels - 1));
  }
  return grid;
}

Glcm compute_glcm(const LevelGrid& grid, const GlcmConfig& config) {
  config.validate();
  const int g = config.levels;
  if (grid.width < 2 || grid.height < 2) throw UsageError("GLCM needs a grid of at least 2x2");

  std::vector<std::uint64_t> counts(static_cast<std::size_t>(g) * g, 0);
  std::uint64_t total = 0;
  for (const auto& o : config.offsets) {
    const int y_begin = std::max(0, -o.dy);
    const int y_end = std::min(grid.height, grid.height - o.dy);
    const int x_begin = std::max(0, -o.dx);
    const int x_end = std::min(grid.width, grid.width - o.dx);
    for (int y = y_begin; y < y_end; ++y) {
      for (int x = x_begin; x < x_end; ++x) {
        const int a = grid.at(x, y);
        const int b = grid.at(x + o.dx, y + o.dy);
        if (a >= g || b >= g) throw UsageError("level index exceeds GLCM gray levels");
        ++counts[static_cast<std::size_t>(a) * g + b];
        ++total;
        if (config.symmetric) {
          ++counts[static_cast<std::size_t>(b) * g + a];
          ++total;
        }
      }
    }
  }
  if (total == 0) throw UsageError("GLCM has no pixel pairs: grid smaller than every offset");

  Glcm glcm{g, std::vector<double>(counts.size())};
  const double inv = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < counts.size(); ++i) glcm.p[i] = static_cast<double>(counts[i]) * inv;
  return glcm;
}

GlcmFeatures haralick_features(const Glcm& glcm) {
  GlcmFeatures f;
  const int g = glcm.levels;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const double p = glcm.at(i, j);
      if (p == 0.0) continue;
      const double d = static_cast<double>(i - j);
      f.contrast += d * d * p;
      f.dissimilarity += std::abs(d) * p;
      f.homogeneity += p / (1.0 + d * d);
      f.asm_ += p * p;
    }
  }
  f.energy = std::sqrt(f.asm_);
  return f;
}

std::string_view to_string(HaralickFeature feature) {
  switch (feature) {
    case HaralickFeature::kContrast:
      return "contrast";
    case HaralickFeature::kHomogeneity:
      return "homogeneity";
    case HaralickFeature::kAsm:
      return "asm";
    case HaralickFeature::kEnergy:
      return "energy";
    case HaralickFeature::kDissimilarity:
      return "dissimilarity";
  }
  return "?";
}

double feature_value(const GlcmFeatures& features, HaralickFeature which) {
  switch (which) {
    case HaralickFeature::kContrast:
      return features.contrast;
    case HaralickFeature::kHomogeneity:
      return features.homogeneity;
    case HaralickFeature::kAsm:
      return features.asm_;
    case HaralickFeature::kEnergy:
      return features.energy;
    case HaralickFeature::kDissimilarity:
      return features.dissimilarity;
  }
  return 0.0;
}

FeatureSelection FeatureSelection::all() {
  FeatureSelection s;
  s.features_.assign(kAllFeatures.begin(), kAllFeatures.end());
  return s;
}

FeatureSelection FeatureSelection::of(std::initializer_list<HaralickFeature> features) {
  FeatureSelection s;
  for (const auto f : kAllFeatures) {
    if (std::find(features.begin(), features.end(), f) != features.end()) s.features_.push_back(f);
  }
  return s;
}

FeatureSelection FeatureSelection::parse(std::string_view text) {
  if (text == "none" || text.empty()) return none();
  if (text == "all") return all();
  std::vector<HaralickFeature> wanted;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find_first_of(",+", start), text.size());
    const std::string_view token = text.substr(start, end - start);
    const auto it = std::find_if(kAllFeatures.begin(), kAllFeatures.end(),
                                 [&](HaralickFeature f) { return to_string(f) == token; });
    if (it == kAllFeatures.end()) {
      throw UsageError("unknown GLCM feature '" + std::string(token) +
                       "' (expected none|all|contrast|homogeneity|asm|energy|dissimilarity)");
    }
    wanted.push_back(*it);
    start = end + 1;
  }
  FeatureSelection s;
  for (const auto f : kAllFeatures) {
    if (std::find(wanted.begin(), wanted.end(), f) != wanted.end()) s.features_.push_back(f);
  }
  return s;
}

bool FeatureSelection::contains(HaralickFeature f) const {
  return std::find(features_.begin(), features_.end(), f) != features_.end();
}

std::string FeatureSelection::name() const {
  if (features_.empty()) return "none";
  if (features_.size() == kAllFeatures.size()) return "all";
  std::string out;
  for (const auto f : features_) {
    if (!out.empty()) out += '+';
    out += to_string(f);
  }
  return out;
}

std::vector<std::string> FeatureSelection::names() const {
  std::vector<std::string> out;
  for (const auto f : features_) out.emplace_back(to_string(f));
  return out;
}

std::vector<double> FeatureSelection::select(const GlcmFeatures& features) const {
  std::vector<double> out;
  out.reserve(features_.size());
  for (const auto f : features_) out.push_back(feature_value(features, f));
  return out;
}

std::vector<double> texture_vector(const imaging::GrayImage& img, const GlcmConfig& config,
                                   const FeatureSelection& selection) {
  if (selection.empty()) return {};
  return selection.select(haralick_features(compute_glcm(quantize(img, config.levels), config)));
}

}  // namespace burnsight::texture
