#include "burnsight/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "burnsight/error.hpp"
#include "burnsight/image_io.hpp"
#include "burnsight/parallel.hpp"
#include "burnsight/random.hpp"

namespace burnsight::imaging {
namespace fs = std::filesystem;

void SynthConfig::validate() const {
  if (per_class_count < 1) throw UsageError("per-class count must be >= 1");
  if (image_size < 32) throw UsageError("image size must be >= 32");
  if (val_per_class < 0 || test_per_class < 0) throw UsageError("split counts must be non-negative");
  if (val_per_class + test_per_class > per_class_count) {
    throw UsageError("val + test per class exceeds per-class count");
  }
  if (!(gain_jitter >= 0.0 && gain_jitter < 1.0)) throw UsageError("gain jitter must be in [0,1)");
  for (const auto& p : class_params) {
    if (p.smoothing_radius < 0) throw UsageError("smoothing radius must be >= 0");
    if (!(p.speckle_scale >= 0.0) || !(p.mean_level >= 0.0 && p.mean_level <= 1.0)) {
      throw UsageError("invalid speckle parameters");
    }
  }
}

GrayImage synthesize_speckle(const SpeckleParams& params, int size, std::uint64_t seed, double gain) {
  const int r = params.smoothing_radius;
  const int padded = size + 2 * r;
  Rng rng(seed);

  // Summed-area table over the padded noise field gives each window sum in O(1).
  const std::size_t stride = static_cast<std::size_t>(padded) + 1;
  std::vector<double> integral(stride * stride, 0.0);
  for (int y = 0; y < padded; ++y) {
    double row_sum = 0.0;
    for (int x = 0; x < padded; ++x) {
      row_sum += rng.exponential();
      integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row_sum;
    }
  }

  const int window = 2 * r + 1;
  const double inv_area = 1.0 / (static_cast<double>(window) * window);
  const double level = params.mean_level * gain;
  std::vector<double> pixels(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double sum = integral[(y + window) * stride + x + window] - integral[y * stride + x + window] -
                         integral[(y + window) * stride + x] + integral[y * stride + x];
      const double speckle = sum * inv_area;
      pixels[static_cast<std::size_t>(y) * size + x] =
          std::clamp(level * (1.0 + params.speckle_scale * (speckle - 1.0)), 0.0, 1.0);
    }
  }
  return GrayImage(size, size, std::move(pixels));
}

DatasetManifest generate_synthetic_dataset(const SynthConfig& config, const fs::path& out_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "images", ec);
  if (ec) throw IoError("cannot create '" + (out_dir / "images").string() + "': " + ec.message());

  DatasetManifest manifest;
  manifest.base_dir = out_dir;
  const int n = config.per_class_count;
  const int train_count = n - config.val_per_class - config.test_per_class;
  for (int c = 0; c < kNumClasses; ++c) {
    for (int i = 0; i < n; ++i) {
      char name[64];
      std::snprintf(name, sizeof name, "images/%s_%05d.png",
                    std::string(kLabelNames[c]).c_str(), i);
      const Split split = i < train_count                             ? Split::kTrain
                          : i < train_count + config.val_per_class ? Split::kVal
                                                                      : Split::kTest;
      manifest.entries.push_back({name, static_cast<BurnLabel>(c), split});
    }
  }

  parallel_for(manifest.entries.size(), [&](std::size_t k) {
    const int c = static_cast<int>(k) / n;
    const int i = static_cast<int>(k) % n;
    const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(c),
                                           static_cast<std::uint64_t>(i));
    double gain = 1.0;
    if (config.gain_jitter > 0.0) {
      Rng gain_rng(derive_seed(seed, 0x6761696eULL));
      gain = gain_rng.uniform(1.0 - config.gain_jitter, 1.0 + config.gain_jitter);
    }
    const GrayImage img = synthesize_speckle(config.class_params[c], config.image_size, seed, gain);
    save_png8(img, out_dir / manifest.entries[k].path);
  });

  save_manifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

}  // namespace burnsight::imaging
