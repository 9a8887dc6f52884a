#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "burnsight/image.hpp"

namespace burnsight::segmentation {

// Per-pixel segment ids forming a partition with labels exactly 0..count-1.
class SegmentMap {
 public:
  SegmentMap() = default;
  // Validates the partition invariant; throws UsageError otherwise.
  SegmentMap(int width, int height, std::vector<std::int32_t> labels);

  // Relabels arbitrary non-negative ids densely in row-major order of first
  // appearance.
  static SegmentMap from_raw(int width, int height, const std::vector<std::int32_t>& raw);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int count() const noexcept { return count_; }
  std::int32_t at(int x, int y) const noexcept {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<std::int32_t>& labels() const noexcept { return labels_; }
  std::vector<std::size_t> segment_sizes() const;

  friend bool operator==(const SegmentMap&, const SegmentMap&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int count_ = 0;
  std::vector<std::int32_t> labels_;
};

struct QuickshiftParams {
  double kernel_size = 5.0;       // Gaussian bandwidth sigma, pixels
  double max_dist = 10.0;         // link radius in the joint space
  double intensity_weight = 10.0; // scale of intensity relative to pixels

  void validate() const;
};

struct FelzenszwalbParams {
  double scale = 30.0;   // k, on 0..255 intensities
  double sigma = 0.8;    // pre-smoothing; 0 disables it
  int min_size = 400;

  void validate() const;
};

// Mode seeking in (x, y, w * intensity). Density is a truncated Gaussian
// kernel sum; each pixel links to its nearest strictly higher neighbour,
// where "higher" orders by (density, -row-major index).
SegmentMap segment_quickshift(const imaging::GrayImage& img, const QuickshiftParams& params = {});

// Graph-based merging over the 8-connected grid, followed by absorption of
// components smaller than min_size.
SegmentMap segment_felzenszwalb(const imaging::GrayImage& img, const FelzenszwalbParams& params = {});

// rows x cols floor-sized tiles; the last row/column absorbs the remainder.
SegmentMap segment_grid(const imaging::GrayImage& img, int rows, int cols);

// Densities computed by segment_quickshift, exposed for invariant checks.
std::vector<double> quickshift_density(const imaging::GrayImage& img, const QuickshiftParams& params);
// Parent index per pixel (itself for roots).
std::vector<std::size_t> quickshift_links(const imaging::GrayImage& img, const QuickshiftParams& params);

// 16-bit PNG of raw segment ids, for debugging.
void save_segment_png(const SegmentMap& map, const std::filesystem::path& path);

}  // namespace burnsight::segmentation
