#include "burnsight/preprocess.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "burnsight/error.hpp"

namespace burnsight::imaging {
namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

GrayImage center_crop(const GrayImage& img, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) throw UsageError("crop target must be at least 1x1");
  if (target_width > img.width() || target_height > img.height()) {
    throw UsageError("crop target " + dims(target_width, target_height) + " exceeds source " +
                     dims(img.width(), img.height()));
  }
  const int x0 = (img.width() - target_width) / 2;
  const int y0 = (img.height() - target_height) / 2;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(target_width) * target_height);
  const auto src = img.pixels();
  for (int y = 0; y < target_height; ++y) {
    const auto row = src.begin() + static_cast<std::ptrdiff_t>(y + y0) * img.width() + x0;
    out.insert(out.end(), row, row + target_width);
  }
  return GrayImage(target_width, target_height, std::move(out));
}

GrayImage resize_bilinear(const GrayImage& img, int target_width, int target_height) {
  if (target_width < 1 || target_height < 1) throw UsageError("resize target must be at least 1x1");
  if (img.empty()) throw UsageError("cannot resize an empty image");

  // Source coordinate and interpolation weight for each output column/row.
  struct Tap {
    int i0;
    int i1;
    double t;
  };
  auto taps = [](int src, int dst) {
    std::vector<Tap> result(static_cast<std::size_t>(dst));
    const double scale = dst > 1 ? static_cast<double>(src - 1) / (dst - 1) : 0.0;
    for (int i = 0; i < dst; ++i) {
      const double pos = i * scale;
      const int i0 = std::min(static_cast<int>(pos), src - 1);
      const int i1 = std::min(i0 + 1, src - 1);
      result[i] = {i0, i1, pos - i0};
    }
    return result;
  };
  const auto xs = taps(img.width(), target_width);
  const auto ys = taps(img.height(), target_height);

  std::vector<double> out(static_cast<std::size_t>(target_width) * target_height);
  for (int y = 0; y < target_height; ++y) {
    const Tap& ty = ys[y];
    for (int x = 0; x < target_width; ++x) {
      const Tap& tx = xs[x];
      const double top = img.at(tx.i0, ty.i0) * (1.0 - tx.t) + img.at(tx.i1, ty.i0) * tx.t;
      const double bottom = img.at(tx.i0, ty.i1) * (1.0 - tx.t) + img.at(tx.i1, ty.i1) * tx.t;
      out[static_cast<std::size_t>(y) * target_width + x] =
          std::clamp(top * (1.0 - ty.t) + bottom * ty.t, 0.0, 1.0);
    }
  }
  return GrayImage(target_width, target_height, std::move(out));
}

GrayImage preprocess(const GrayImage& img, const PreprocessOptions& options) {
  if (img.width() < options.output_size || img.height() < options.output_size) {
    throw UsageError("preprocess needs at least " + dims(options.output_size, options.output_size) +
                     ", got " + dims(img.width(), img.height()));
  }
  const GrayImage cropped = center_crop(img, std::min(img.width(), options.crop_width),
                                        std::min(img.height(), options.crop_height));
  return resize_bilinear(cropped, options.output_size, options.output_size);
}

}  // namespace burnsight::imaging
