#pragma once

#include <array>
#include <cstdint>
#include <filesystem>

#include "burnsight/image.hpp"
#include "burnsight/manifest.hpp"

namespace burnsight::imaging {

// Multiplicative speckle: unit-mean exponential noise box-filtered over a
// (2r+1)^2 window, then intensity = mean_level * (1 + speckle_scale * (s - 1)),
// clamped to [0, 1].
struct SpeckleParams {
  double speckle_scale = 1.0;
  int smoothing_radius = 1;
  double mean_level = 0.5;
};

struct SynthConfig {
  int per_class_count = 100;
  int image_size = 224;
  std::uint64_t seed = 0;
  // Per class, in BurnLabel order. Classes share a brightness range but
  // differ in speckle grain, so first-order statistics separate them poorly.
  std::array<SpeckleParams, kNumClasses> class_params = {{
      {1.0, 1, 0.44},
      {1.0, 2, 0.50},
      {1.0, 4, 0.56},
  }};
  // Per-image multiplicative brightness jitter, uniform in [1 - g, 1 + g].
  double gain_jitter = 0.15;
  // Within each class the first entries go to train, then val, then test.
  int val_per_class = 0;
  int test_per_class = 0;

  void validate() const;
};

GrayImage synthesize_speckle(const SpeckleParams& params, int size, std::uint64_t seed,
                             double gain = 1.0);

// Writes images/<label>_<index>.png (8-bit) plus manifest.csv into out_dir
// and returns the manifest. Output is a pure function of the config.
DatasetManifest generate_synthetic_dataset(const SynthConfig& config,
                                           const std::filesystem::path& out_dir);

}  // namespace burnsight::imaging
