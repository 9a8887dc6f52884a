#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "burnsight/image.hpp"
#include "burnsight/segmentation.hpp"

namespace burnsight::explain {

// Binary perturbation masks, one row per sample, one column per segment.
struct MaskMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> bits;

  std::span<const std::uint8_t> row(int i) const {
    return std::span<const std::uint8_t>(bits).subspan(static_cast<std::size_t>(i) * cols,
                                                       static_cast<std::size_t>(cols));
  }
};

// Independent fair bits, except row 0 which is all ones (the unperturbed
// instance).
MaskMatrix sample_masks(int count, int num_segments, std::uint64_t seed);

struct FillMode {
  enum class Kind { kSegmentMean, kConstant };
  Kind kind = Kind::kSegmentMean;
  double value = 0.0;

  static FillMode segment_mean() { return {}; }
  static FillMode constant(double v) { return {Kind::kConstant, v}; }
};

// Replaces the pixels of every segment whose mask bit is 0 with the fill
// value; other pixels are copied unchanged.
imaging::GrayImage apply_mask(const imaging::GrayImage& img, const segmentation::SegmentMap& segments,
                              std::span<const std::uint8_t> mask, FillMode fill);

// exp(-d^2 / sigma^2) with d the cosine distance to the all-ones mask,
// which for binary masks is 1 - sqrt(fraction of ones). The all-zero mask
// takes the limiting distance 1.
double kernel_weight(std::span<const std::uint8_t> mask, double kernel_width);

struct LimeConfig {
  int num_samples = 10000;
  double kernel_width = 0.25;
  double ridge_lambda = 1.0;
  int top_k = 5;
  FillMode fill = FillMode::segment_mean();
  std::uint64_t seed = 0;
  // Explain this class instead of the unperturbed argmax.
  std::optional<int> target_class;

  void validate() const;
};

struct Explanation {
  int target_class = 0;
  std::vector<double> scores;  // one per segment; zero when not selected
  double intercept = 0.0;
  double r2 = 0.0;             // weighted R^2 of the restricted fit
  double min_weight = 0.0;
  double max_weight = 0.0;
  std::vector<int> selected;   // segments kept by top-K, by descending |coef|

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

// Weighted ridge on all segments, keep the top_k by |coefficient| (lower
// index on ties), then refit on those alone.
Explanation fit_surrogate(const MaskMatrix& masks, std::span<const double> predictions,
                          std::span<const double> weights, double lambda, int top_k);

// The explainer only ever sees this callable. Set `concurrent` when predict
// may be invoked from several threads at once.
struct Classifier {
  std::function<std::vector<double>(const imaging::GrayImage&)> predict;
  bool concurrent = false;
};

// sample_masks -> apply_mask -> predict -> kernel_weight -> fit_surrogate.
Explanation explain(const Classifier& classifier, const imaging::GrayImage& img,
                    const segmentation::SegmentMap& segments, const LimeConfig& config);

}  // namespace burnsight::explain
