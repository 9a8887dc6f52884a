#include "burnsight/image.hpp"

#include <numeric>
#include <string>

#include "burnsight/error.hpp"

namespace burnsight::imaging {

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 0 || height < 0) throw UsageError("image dimensions must be non-negative");
  if (!(fill >= 0.0 && fill <= 1.0)) throw UsageError("fill intensity outside [0,1]");
  data_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw UsageError("image dimensions must be non-negative");
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw UsageError("image data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!(data_[i] >= 0.0 && data_[i] <= 1.0)) {
      throw UsageError("intensity at index " + std::to_string(i) + " outside [0,1]");
    }
  }
}

double GrayImage::mean() const {
  if (data_.empty()) return 0.0;
  return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

}  // namespace burnsight::imaging
