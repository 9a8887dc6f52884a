#pragma once

#include "burnsight/image.hpp"

namespace burnsight::imaging {

inline constexpr int kModelInputSize = 224;
inline constexpr int kDefaultCropWidth = 800;
inline constexpr int kDefaultCropHeight = 1000;

// Centered window. When the margin is odd the extra pixel is dropped on the
// right/bottom side, i.e. the window starts at floor(margin / 2).
GrayImage center_crop(const GrayImage& img, int target_width, int target_height);

// Bilinear resampling with corner-aligned sample positions:
// x_src = x_dst * (W_src - 1) / (W_dst - 1).
GrayImage resize_bilinear(const GrayImage& img, int target_width, int target_height);

struct PreprocessOptions {
  int crop_width = kDefaultCropWidth;
  int crop_height = kDefaultCropHeight;
  int output_size = kModelInputSize;
};

// Crop to min(source, crop size) then resize to output_size x output_size.
// Inputs smaller than the output size are rejected. Intensities are already
// normalized to [0, 1] by GrayImage.
GrayImage preprocess(const GrayImage& img, const PreprocessOptions& options = {});

}  // namespace burnsight::imaging
