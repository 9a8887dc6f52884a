#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "burnsight/image.hpp"

namespace burnsight::texture {

struct Offset {
  int dy = 0;
  int dx = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

struct GlcmConfig {
  int levels = 32;
  // Distance 1 at 0, 45, 90 and 135 degrees.
  std::vector<Offset> offsets = {{0, 1}, {-1, 1}, {-1, 0}, {-1, -1}};
  bool symmetric = true;

  void validate() const;
};

// Quantized image: level = min(floor(intensity * G), G - 1).
struct LevelGrid {
  int width = 0;
  int height = 0;
  int levels = 0;
  std::vector<std::uint16_t> data;

  std::uint16_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

LevelGrid quantize(const imaging::GrayImage& img, int levels);

// Normalized co-occurrence probabilities, row-major G x G.
struct Glcm {
  int levels = 0;
  std::vector<double> p;

  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

// Pools every offset into a single matrix; symmetric mode also counts each
// transposed pair. Throws UsageError if no pair fits inside the grid.
Glcm compute_glcm(const LevelGrid& grid, const GlcmConfig& config);

struct GlcmFeatures {
  double contrast = 0.0;
  double dissimilarity = 0.0;
  double homogeneity = 0.0;
  double asm_ = 0.0;  // angular second moment
  double energy = 0.0;
};

GlcmFeatures haralick_features(const Glcm& glcm);

// Canonical concatenation order of the secondary feature vector.
enum class HaralickFeature { kContrast, kHomogeneity, kAsm, kEnergy, kDissimilarity };
inline constexpr std::array<HaralickFeature, 5> kAllFeatures = {
    HaralickFeature::kContrast, HaralickFeature::kHomogeneity, HaralickFeature::kAsm,
    HaralickFeature::kEnergy, HaralickFeature::kDissimilarity};

std::string_view to_string(HaralickFeature feature);
double feature_value(const GlcmFeatures& features, HaralickFeature which);

// Ordered, duplicate-free subset of kAllFeatures.
class FeatureSelection {
 public:
  FeatureSelection() = default;
  static FeatureSelection none() { return {}; }
  static FeatureSelection all();
  static FeatureSelection of(std::initializer_list<HaralickFeature> features);
  // Accepts "none", "all" or a comma-separated list of feature names.
  // Throws UsageError on unknown names.
  static FeatureSelection parse(std::string_view text);

  std::span<const HaralickFeature> features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  bool empty() const { return features_.empty(); }
  bool contains(HaralickFeature f) const;
  // "none", "all", or names joined with '+'.
  std::string name() const;
  std::vector<std::string> names() const;

  std::vector<double> select(const GlcmFeatures& features) const;

  friend bool operator==(const FeatureSelection&, const FeatureSelection&) = default;

 private:
  std::vector<HaralickFeature> features_;
};

// quantize -> compute_glcm -> haralick_features -> select.
std::vector<double> texture_vector(const imaging::GrayImage& img, const GlcmConfig& config,
                                   const FeatureSelection& selection);

}  // namespace burnsight::texture
